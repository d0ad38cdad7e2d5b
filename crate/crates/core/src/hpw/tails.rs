//! Spectral mass below and above a level `r` of `zeta`, the matching tail
//! bounds with unit constants, and the count of low frequencies.

use serde::{Deserialize, Serialize};

use super::{fourier_term_lp, fourier_term_p1, InequalityConfig};
use crate::error::{Error, Result};
use crate::fourier::{FourierField, LambdaGridSpec};
use crate::group::GroupDescriptor;
use crate::hermite::{enumerate_multi_indices, zeta, SpectralParameter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSide {
    /// `zeta(alpha, lambda) <= r`.
    Below,
    /// `zeta(alpha, lambda) > r`.
    Above,
}

/// `sum_i w_i sum_{alpha on side} ||M_i e_alpha||^2` with the field's weights.
pub fn spectral_tail_mass(field: &FourierField, r: f64, side: TailSide) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("level must be positive, got {r}")));
    }
    let mut total = 0.0;
    for (m, w) in field.ops.iter().zip(&field.weights) {
        let idx = enumerate_multi_indices(m.sp.n(), m.cutoff);
        let mut s = 0.0;
        for (c, alpha) in idx.iter().enumerate() {
            let below = zeta(alpha, &m.sp) <= r;
            if below == (side == TailSide::Below) {
                s += m.entries.column(c).norm_squared();
            }
        }
        total += w * s;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub r: f64,
    pub below_mass: f64,
    pub below_bound: f64,
    pub below_ratio: f64,
    pub above_mass: f64,
    pub above_bound: f64,
    pub above_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailTable {
    pub config: InequalityConfig,
    pub rows: Vec<TailRow>,
    /// Largest below-ratio over the levels.
    pub below_constant: f64,
    /// Largest above-ratio over the levels.
    pub above_constant: f64,
}

fn ratio(mass: f64, bound: f64) -> f64 {
    if mass == 0.0 {
        0.0
    } else {
        mass / bound
    }
}

/// Compares the tail masses with
/// `r^{(n+k)(1-2/p')} ||f||_p^2` (below) and
/// `r^{(n+k - beta p/(2-p))(1-2/p')} A(f, beta)^{2/p'}` (above), where
/// `A(f, beta)` is the Fourier integral before its root. At `p = 1` the
/// exponent `1 - 2/p'` is 1 and `A^{2/p'}` becomes the squared operator-norm
/// supremum.
pub fn tail_bound_check(
    g: &GroupDescriptor,
    field: &FourierField,
    norm_p: f64,
    cfg: &InequalityConfig,
    r_grid: &[f64],
) -> Result<TailTable> {
    let nk = (g.n() + g.k()) as f64;
    let theta = match cfg.p_conj {
        None => 1.0,
        Some(pc) => 1.0 - 2.0 / pc,
    };
    let above_scale = match cfg.p_conj {
        None => fourier_term_p1(field, cfg.beta)?.value.powi(2),
        Some(pc) => fourier_term_lp(field, cfg.beta, pc)?.powf(2.0 / pc),
    };
    let decay = nk - cfg.beta * cfg.p / (2.0 - cfg.p);
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let below_mass = spectral_tail_mass(field, r, TailSide::Below)?;
        let above_mass = spectral_tail_mass(field, r, TailSide::Above)?;
        let below_bound = r.powf(nk * theta) * norm_p * norm_p;
        let above_bound = r.powf(decay * theta) * above_scale;
        rows.push(TailRow {
            r,
            below_mass,
            below_bound,
            below_ratio: ratio(below_mass, below_bound),
            above_mass,
            above_bound,
            above_ratio: ratio(above_mass, above_bound),
        });
    }
    let below_constant = rows.iter().map(|r| r.below_ratio).fold(0.0, f64::max);
    let above_constant = rows.iter().map(|r| r.above_ratio).fold(0.0, f64::max);
    Ok(TailTable { config: *cfg, rows, below_constant, above_constant })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `#{alpha in N^n : zeta(alpha, lambda) <= r}` without any cutoff.
pub fn frequency_count(sp: &SpectralParameter, r: f64) -> f64 {
    let eta = &sp.eta;
    let equal = eta.iter().all(|e| (e - eta[0]).abs() <= 1e-14 * eta[0]);
    if equal {
        let n = eta.len();
        // (2|alpha| + n) eta <= r
        let m = (r / eta[0] - n as f64) / 2.0;
        if m < 0.0 {
            return 0.0;
        }
        let m = m.floor() as usize;
        return binomial(m + n, n);
    }
    fn rec(eta: &[f64], budget: f64) -> f64 {
        match eta.split_first() {
            None => 1.0,
            Some((e, rest)) => {
                let floor: f64 = rest.iter().sum();
                let mut total = 0.0;
                let mut a = 0usize;
                loop {
                    let used = (2 * a + 1) as f64 * e;
                    if used + floor > budget {
                        break;
                    }
                    total += rec(rest, budget - used);
                    a += 1;
                }
                total
            }
        }
    }
    rec(eta, r)
}

/// `int sum_{zeta(alpha, lambda) <= r} |Pf(lambda)| dlambda` on the grid.
pub fn frequency_count_measure(g: &GroupDescriptor, grid: &LambdaGridSpec, r: f64) -> Result<f64> {
    let lg = grid.build(g.k())?;
    let mut total = 0.0;
    for (l, w) in lg.points.iter().zip(&lg.weights) {
        let sp = SpectralParameter::new(g, l)?;
        total += w * sp.pfaffian * frequency_count(&sp, r);
    }
    Ok(total)
}

/// Least-squares slope and intercept of `log measure` against `log r`.
pub fn count_scaling_exponent(g: &GroupDescriptor, grid: &LambdaGridSpec, r_values: &[f64]) -> Result<(f64, f64)> {
    if r_values.len() < 2 {
        return Err(Error::InvalidParameter("regression needs at least two levels".into()));
    }
    let pts = r_values
        .iter()
        .map(|&r| Ok((r.ln(), frequency_count_measure(g, grid, r)?.ln())))
        .collect::<Result<Vec<_>>>()?;
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
