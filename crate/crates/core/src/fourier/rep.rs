//! Matrix elements of the Schrodinger-type representations `pi_lambda`.
//!
//! In chart coordinates
//! `pi_lambda(p, q, t) phi(xi) = e^{i lambda.t + i sum_j eta_j (p_j xi_j + p_j q_j / 2)} phi(xi + q)`,
//! so `<pi_lambda(x) Phi_alpha, Phi_gamma>` factors into one-dimensional
//! integrals per coordinate times the central character.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::hermite::{basis_dim, enumerate_multi_indices, hermite_all, SpectralParameter};
use crate::quadrature::gauss_hermite;

/// Gauss-Hermite size used for one-dimensional matrix elements at `cutoff`.
pub fn rep_quadrature_nodes(cutoff: usize) -> usize {
    (2 * cutoff + 48).max(64)
}

/// `T[gamma][alpha] = int e^{i a s} phi_alpha(s + b/2) phi_gamma(s - b/2) ds`.
///
/// With `a = sqrt(eta) p`, `b = sqrt(eta) q` this is the one-dimensional
/// factor `<pi(p, q, 0) phi_{alpha, eta}, phi_{gamma, eta}>`.
pub fn matrix_element_table(cutoff: usize, a: f64, b: f64) -> DMatrix<Complex64> {
    let gh = gauss_hermite(rep_quadrature_nodes(cutoff));
    let d = cutoff + 1;
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    let mut plus = vec![0.0; d];
    let mut minus = vec![0.0; d];
    for (&s, &w) in gh.nodes.iter().zip(&gh.scaled_weights) {
        hermite_all(cutoff, s + 0.5 * b, &mut plus);
        hermite_all(cutoff, s - 0.5 * b, &mut minus);
        let ph = Complex64::from_polar(w, a * s);
        for al in 0..d {
            if plus[al] == 0.0 {
                continue;
            }
            let c = ph * plus[al];
            for ga in 0..d {
                out[(ga, al)] += c * minus[ga];
            }
        }
    }
    out
}

/// Truncated matrix `[<pi_lambda(x) Phi_alpha, Phi_gamma>]_{gamma, alpha}` over
/// `|alpha|, |gamma| <= cutoff`.
pub fn rep_matrix(x: &GroupPoint, sp: &SpectralParameter, cutoff: usize) -> Result<DMatrix<Complex64>> {
    let n = sp.n();
    if x.n() != n || x.k() != sp.lambda.len() {
        return Err(Error::Dimension("point and spectral parameter disagree".into()));
    }
    let pq = sp.chart.to_chart(&x.v());
    let tables: Vec<DMatrix<Complex64>> = (0..n)
        .map(|j| {
            let se = sp.eta[j].sqrt();
            matrix_element_table(cutoff, se * pq[j], se * pq[n + j])
        })
        .collect();
    let central: f64 = sp.lambda.iter().zip(&x.t).map(|(l, t)| l * t).sum();
    let phase = Complex64::from_polar(1.0, central);
    let idx = enumerate_multi_indices(n, cutoff);
    let d = idx.len();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (c, al) in idx.iter().enumerate() {
        for (r, ga) in idx.iter().enumerate() {
            let mut v = phase;
            for j in 0..n {
                v *= tables[j][(ga.entries[j], al.entries[j])];
            }
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

/// Cutoff `N` with `basis_dim(n, N) == len`.
pub fn cutoff_for_len(n: usize, len: usize) -> Result<usize> {
    let mut c = 0;
    loop {
        let d = basis_dim(n, c);
        if d == len {
            return Ok(c);
        }
        if d > len {
            return Err(Error::Dimension(format!("{len} is not a basis size for n = {n}")));
        }
        c += 1;
    }
}

/// Applies the truncated `pi_lambda(x)` to Hermite coefficients.
pub fn rep_apply(x: &GroupPoint, sp: &SpectralParameter, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let cutoff = cutoff_for_len(sp.n(), coeffs.len())?;
    let m = rep_matrix(x, sp, cutoff)?;
    let v = nalgebra::DVector::from_column_slice(coeffs);
    Ok((m * v).iter().copied().collect())
}
