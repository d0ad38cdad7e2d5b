//! Derivative-free minimization of the HPW ratio over a box-constrained
//! Gaussian family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HpwEvaluator, HpwSetup, InequalityConfig};
use crate::error::{Error, Result};
use crate::functions::{Gaussian, GaussianSpec};
use crate::group::{GroupDescriptor, GroupPoint};

/// Parameters `theta = (ln a, ln b, c, y)` of
/// `x -> exp(-a |v|^2 - b |t|^2 + i c t_1)` left-translated by `(y e_1, 0, 0)`.
/// Coordinates with `lower == upper` are frozen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFamily {
    pub lower: [f64; 4],
    pub upper: [f64; 4],
    pub start: [f64; 4],
}

impl GaussianFamily {
    pub fn singleton(theta: [f64; 4]) -> Self {
        Self { lower: theta, upper: theta, start: theta }
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            let (lo, hi, s) = (self.lower[i], self.upper[i], self.start[i]);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParameter(format!("bad bounds [{lo}, {hi}] for parameter {i}")));
            }
            if !(lo..=hi).contains(&s) {
                return Err(Error::InvalidParameter(format!("start {s} outside [{lo}, {hi}] for parameter {i}")));
            }
        }
        Ok(())
    }

    pub fn free_dims(&self) -> Vec<usize> {
        (0..4).filter(|&i| self.upper[i] > self.lower[i]).collect()
    }

    pub fn clamp(&self, theta: [f64; 4]) -> [f64; 4] {
        std::array::from_fn(|i| theta[i].clamp(self.lower[i], self.upper[i]))
    }

    pub fn member(g: &GroupDescriptor, theta: &[f64; 4]) -> Result<Gaussian> {
        let mut c = vec![0.0; g.k()];
        c[0] = theta[2];
        let mut p = vec![0.0; g.n()];
        p[0] = theta[3];
        let y = GroupPoint::new(p, vec![0.0; g.n()], vec![0.0; g.k()])?;
        Gaussian::new(g, theta[0].exp(), theta[1].exp())?.modulated(&c)?.translated(&y)
    }

    /// The parameters of a config Gaussian when it lies in the family's
    /// coordinates (modulation and translation along the first axes only).
    pub fn theta_of(g: &GroupDescriptor, spec: &GaussianSpec) -> Option<[f64; 4]> {
        let tail_zero = |v: &[f64], from: usize| v.iter().skip(from).all(|x| *x == 0.0);
        if !(spec.a > 0.0 && spec.b > 0.0 && spec.amplitude != 0.0) {
            return None;
        }
        if !tail_zero(&spec.modulation, 1) || !tail_zero(&spec.shift_v, 1) || !tail_zero(&spec.shift_t, 0) {
            return None;
        }
        if spec.modulation.len() > g.k() || spec.shift_v.len() > 2 * g.n() {
            return None;
        }
        let c = spec.modulation.first().copied().unwrap_or(0.0);
        let y = spec.shift_v.first().copied().unwrap_or(0.0);
        Some([spec.a.ln(), spec.b.ln(), c, y])
    }

    /// Parameters of `member(theta) o delta_{1/r}`.
    pub fn dilate_theta(theta: &[f64; 4], r: f64) -> [f64; 4] {
        [theta[0] - 2.0 * r.ln(), theta[1] - 4.0 * r.ln(), theta[2] / (r * r), theta[3] * r]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Total number of ratio evaluations, including the scan.
    pub budget: usize,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: f64,
    pub seed: u64,
    /// Extra points evaluated (even outside the box) before the simplex
    /// starts; the best point seeds it.
    #[serde(default)]
    pub scan: Vec<[f64; 4]>,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { budget: 40, initial_step: 0.25, seed: 0, scan: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub evaluation: usize,
    pub theta: [f64; 4],
    pub ratio: f64,
    pub best_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub config: InequalityConfig,
    pub min_ratio: f64,
    pub argmin: [f64; 4],
    pub evaluations: usize,
    pub seed: u64,
    pub trajectory: Vec<TrajectoryPoint>,
    /// Set when an evaluation was non-finite and the search stopped.
    pub aborted: Option<String>,
}

struct Budgeted<'a> {
    g: &'a GroupDescriptor,
    family: &'a GaussianFamily,
    cfg: &'a InequalityConfig,
    setup: &'a HpwSetup,
    budget: usize,
    trajectory: Vec<TrajectoryPoint>,
    best: ([f64; 4], f64),
    aborted: Option<String>,
}

impl Budgeted<'_> {
    fn exhausted(&self) -> bool {
        self.trajectory.len() >= self.budget || self.aborted.is_some()
    }

    /// `None` once the budget is spent or the search was aborted.
    fn eval(&mut self, theta: [f64; 4]) -> Result<Option<f64>> {
        self.eval_raw(self.family.clamp(theta))
    }

    /// Evaluates without projecting onto the box (scan points).
    fn eval_raw(&mut self, theta: [f64; 4]) -> Result<Option<f64>> {
        if self.exhausted() {
            return Ok(None);
        }
        let f = GaussianFamily::member(self.g, &theta)?;
        let ratio = match HpwEvaluator::new(self.g, &f, *self.setup).and_then(|e| e.report(self.cfg)) {
            Ok(r) => r.ratio,
            Err(Error::NonFinite(what)) => {
                self.aborted = Some(format!("non-finite {what} at {theta:?}"));
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        if ratio < self.best.1 {
            self.best = (theta, ratio);
        }
        self.trajectory.push(TrajectoryPoint {
            evaluation: self.trajectory.len(),
            theta,
            ratio,
            best_ratio: self.best.1,
        });
        Ok(Some(ratio))
    }
}

fn lerp(a: &[f64; 4], b: &[f64; 4], t: f64) -> [f64; 4] {
    std::array::from_fn(|i| a[i] + t * (b[i] - a[i]))
}

/// Minimizes the HPW ratio over the family with Nelder-Mead on the free
/// coordinates (projected onto the box). Deterministic given the seed.
pub fn estimate_constant(
    g: &GroupDescriptor,
    family: &GaussianFamily,
    cfg: &InequalityConfig,
    setup: &HpwSetup,
    opts: &NelderMeadOptions,
) -> Result<EstimateReport> {
    family.validate()?;
    if opts.budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let mut run = Budgeted {
        g,
        family,
        cfg,
        setup,
        budget: opts.budget,
        trajectory: Vec::new(),
        best: (family.start, f64::INFINITY),
        aborted: None,
    };
    run.eval(family.start)?;
    for s in &opts.scan {
        run.eval_raw(*s)?;
    }
    let free = family.free_dims();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    if !free.is_empty() && !run.exhausted() {
        let origin = run.best;
        let mut simplex: Vec<([f64; 4], f64)> = vec![origin];
        for &d in &free {
            let width = family.upper[d] - family.lower[d];
            let mut x = origin.0;
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let mut step = sign * opts.initial_step * width;
            // step back inside the box when the preferred side is cramped
            if !(family.lower[d]..=family.upper[d]).contains(&(x[d] + step)) {
                step = -step;
            }
            x[d] = (x[d] + step).clamp(family.lower[d], family.upper[d]);
            match run.eval(x)? {
                Some(v) => simplex.push((family.clamp(x), v)),
                None => break,
            }
        }
        if simplex.len() == free.len() + 1 {
            nelder_mead(&mut run, &mut simplex)?;
        }
    }
    Ok(EstimateReport {
        config: *cfg,
        min_ratio: run.best.1,
        argmin: run.best.0,
        evaluations: run.trajectory.len(),
        seed: opts.seed,
        trajectory: run.trajectory,
        aborted: run.aborted,
    })
}

fn nelder_mead(run: &mut Budgeted<'_>, simplex: &mut [([f64; 4], f64)]) -> Result<()> {
    let n = simplex.len() - 1;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let worst = simplex[n];
        let centroid: [f64; 4] =
            std::array::from_fn(|i| simplex[..n].iter().map(|s| s.0[i]).sum::<f64>() / n as f64);
        let reflected = run.family.clamp(lerp(&centroid, &worst.0, -1.0));
        let Some(fr) = run.eval(reflected)? else { return Ok(()) };
        if fr < simplex[0].1 {
            let expanded = run.family.clamp(lerp(&centroid, &worst.0, -2.0));
            let Some(fe) = run.eval(expanded)? else { return Ok(()) };
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (target, ft) = if fr < worst.1 { (reflected, fr) } else { (worst.0, worst.1) };
        let contracted = run.family.clamp(lerp(&centroid, &target, 0.5));
        let Some(fc) = run.eval(contracted)? else { return Ok(()) };
        if fc < ft {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0;
        for s in simplex.iter_mut().skip(1) {
            let x = lerp(&best, &s.0, 0.5);
            let Some(v) = run.eval(x)? else { return Ok(()) };
            *s = (x, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_helpers() {
        let fam = GaussianFamily { lower: [-1.0, -1.0, 0.0, 0.0], upper: [1.0, -1.0, 0.5, 0.0], start: [0.0, -1.0, 0.0, 0.0] };
        fam.validate().unwrap();
        assert_eq!(fam.free_dims(), vec![0, 2]);
        assert_eq!(fam.clamp([3.0, 0.0, -1.0, 2.0]), [1.0, -1.0, 0.0, 0.0]);
        let bad = GaussianFamily { start: [2.0, -1.0, 0.0, 0.0], ..fam };
        assert!(bad.validate().is_err());
        let g = GroupDescriptor::heisenberg(1).unwrap();
        let th = [0.2, -0.3, 0.4, 0.5];
        let a = GaussianFamily::member(&g, &GaussianFamily::dilate_theta(&th, 1.7)).unwrap();
        let b = GaussianFamily::member(&g, &th).unwrap().dilated(1.7).unwrap();
        let x = GroupPoint::new(vec![0.3], vec![-0.8], vec![0.6]).unwrap();
        use crate::functions::GroupFunction;
        assert!((a.eval(&x) - b.eval(&x)).norm() < 1e-14);
    }
}
