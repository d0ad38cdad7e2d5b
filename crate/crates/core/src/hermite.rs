//! Hermite functions, the tensor eigenbasis of the scaled Hermite operator
//! `H(eta) = sum_j (-d^2/dxi_j^2 + eta_j^2 xi_j^2)` and its eigenvalues.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::SpectralOperator;
use crate::group::{Chart, GroupDescriptor};

const RESCALE: f64 = 1e150;

/// Fills `out[0..=nmax]` with the normalized Hermite functions at `tau`.
///
/// The recurrence runs on a mantissa with a separately tracked exponent, so
/// the Gaussian factor never underflows before the polynomial growth has
/// been applied.
pub fn hermite_all(nmax: usize, tau: f64, out: &mut [f64]) {
    assert!(out.len() > nmax, "output buffer too short");
    let ln_rescale = RESCALE.ln();
    let mut log_scale = -0.5 * tau * tau;
    let emit = |mant: f64, log_scale: f64| -> f64 {
        if mant == 0.0 {
            0.0
        } else {
            mant.signum() * (mant.abs().ln() + log_scale).exp()
        }
    };
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out[0] = emit(cur, log_scale);
    for m in 0..nmax {
        let mf = m as f64;
        let next = (2.0 / (mf + 1.0)).sqrt() * tau * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += ln_rescale;
        }
        out[m + 1] = emit(cur, log_scale);
    }
}

/// L^2-normalized Hermite function `phi_m(tau)`.
pub fn hermite_eval(m: usize, tau: f64) -> f64 {
    let mut buf = vec![0.0; m + 1];
    hermite_all(m, tau, &mut buf);
    buf[m]
}

/// `phi_{m, beta}(tau) = beta^{1/4} phi_m(beta^{1/2} tau)`.
pub fn scaled_hermite_eval(m: usize, beta: f64, tau: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(beta.powf(0.25) * hermite_eval(m, beta.sqrt() * tau))
}

/// Multi-index `alpha` in `N^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self { entries }
    }

    pub fn order(&self) -> usize {
        self.entries.iter().sum()
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }
}

/// `binom(cutoff + n, n)`, the number of multi-indices with `|alpha| <= cutoff`.
pub fn basis_dim(n: usize, cutoff: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc * (cutoff as u128 + i) / i;
    }
    acc as usize
}

fn compositions(n: usize, degree: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if n == 1 {
        prefix.push(degree);
        out.push(MultiIndex::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first);
        compositions(n - 1, degree - first, prefix, out);
        prefix.pop();
    }
}

/// All `alpha` with `|alpha| <= cutoff`, by total degree and then
/// lexicographically with larger leading entries first: `(1,0)` precedes `(0,1)`.
pub fn enumerate_multi_indices(n: usize, cutoff: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(basis_dim(n, cutoff));
    let mut prefix = Vec::with_capacity(n);
    for d in 0..=cutoff {
        compositions(n, d, &mut prefix, &mut out);
    }
    out
}

/// Canonical enumeration together with a reverse lookup.
#[derive(Debug, Clone)]
pub struct MultiIndexSet {
    pub n: usize,
    pub cutoff: usize,
    pub indices: Vec<MultiIndex>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl MultiIndexSet {
    pub fn new(n: usize, cutoff: usize) -> Self {
        let indices = enumerate_multi_indices(n, cutoff);
        let lookup = indices.iter().enumerate().map(|(i, a)| (a.entries.clone(), i)).collect();
        Self { n, cutoff, indices, lookup }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(&alpha.entries).copied()
    }
}

/// How the almost-symplectic chart at `lambda` was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Reference axes (`H^n`, `lambda < 0`).
    Reference,
    /// Reference axes with `P` and `Q` exchanged (`H^n`, `lambda > 0`).
    Swapped,
    /// Gram-Schmidt chart of an H-type group.
    GramSchmidt,
}

/// A frequency `lambda` with `eta(lambda)`, `|Pf(lambda)|` and its chart.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralParameter {
    pub lambda: Vec<f64>,
    pub eta: Vec<f64>,
    pub pfaffian: f64,
    pub orientation: Orientation,
    pub chart: Chart,
}

impl SpectralParameter {
    pub fn new(g: &GroupDescriptor, lambda: &[f64]) -> Result<Self> {
        let eta = g.eta(lambda)?;
        let doubled: Vec<f64> = lambda.iter().map(|l| 2.0 * l).collect();
        let eta2 = g.eta(&doubled)?;
        for (a, b) in eta.iter().zip(&eta2) {
            if (b - 2.0 * a).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::InvalidParameter("eta is not homogeneous of degree one".into()));
            }
        }
        let chart = g.chart(lambda)?;
        let orientation = if !g.is_heisenberg() {
            Orientation::GramSchmidt
        } else if lambda[0] < 0.0 {
            Orientation::Reference
        } else {
            Orientation::Swapped
        };
        let pfaffian = eta.iter().product();
        Ok(Self { lambda: lambda.to_vec(), eta, pfaffian, orientation, chart })
    }

    pub fn n(&self) -> usize {
        self.eta.len()
    }

    pub fn lambda_norm(&self) -> f64 {
        self.lambda.iter().map(|l| l * l).sum::<f64>().sqrt()
    }
}

/// `Phi_alpha^{eta}(xi) = prod_j phi_{alpha_j, eta_j}(xi_j)`.
pub fn phi_alpha_eval(alpha: &MultiIndex, sp: &SpectralParameter, xi: &[f64]) -> Result<f64> {
    if alpha.n() != sp.n() || xi.len() != sp.n() {
        return Err(Error::Dimension(format!(
            "alpha has {} entries, xi {}, eta {}",
            alpha.n(),
            xi.len(),
            sp.n()
        )));
    }
    let mut v = 1.0;
    for ((&m, &e), &x) in alpha.entries.iter().zip(&sp.eta).zip(xi) {
        v *= scaled_hermite_eval(m, e, x)?;
    }
    Ok(v)
}

/// `zeta(alpha, lambda) = sum_j (2 alpha_j + 1) eta_j(lambda)`.
pub fn zeta(alpha: &MultiIndex, sp: &SpectralParameter) -> f64 {
    alpha
        .entries
        .iter()
        .zip(&sp.eta)
        .map(|(&a, &e)| (2.0 * a as f64 + 1.0) * e)
        .sum()
}

/// Right-multiplies the matrix by `H(eta(lambda))^{beta_half}`: column
/// `alpha` is scaled by `zeta(alpha, lambda)^{beta_half}`.
pub fn apply_h_power(m: &SpectralOperator, beta_half: f64) -> SpectralOperator {
    let mut out = m.clone();
    if beta_half == 0.0 {
        return out;
    }
    for (c, alpha) in enumerate_multi_indices(m.sp.n(), m.cutoff).iter().enumerate() {
        let s = zeta(alpha, &m.sp).powf(beta_half);
        out.entries.column_mut(c).scale_mut(s);
    }
    out
}
