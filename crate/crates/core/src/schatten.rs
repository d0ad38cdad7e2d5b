//! Singular values, Schatten norms and frame bounds for complex matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the orthonormality check in [`onb_power_sum`].
pub const ONB_TOL: f64 = 1e-10;

/// Singular values in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Exponent of a Schatten norm; `Infinity` is the operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SchattenP {
    Finite(f64),
    Infinity,
}

impl SchattenP {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("Schatten exponent must be >= 1, got {p}")));
        }
        Ok(if p.is_infinite() { Self::Infinity } else { Self::Finite(p) })
    }
}

fn check_finite(m: &DMatrix<Complex64>) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    Ok(())
}

/// Singular values from the eigenvalues of `M^* M`, clamped at zero.
pub fn singular_values(m: &DMatrix<Complex64>) -> Result<SingularSpectrum> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(SingularSpectrum { values: vec![] });
    }
    let gram = m.adjoint() * m;
    let eig = SymmetricEigen::new(gram);
    let mut values: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(SingularSpectrum { values })
}

/// `l^p` norm of a nonnegative sequence, scaled to avoid overflow.
pub fn lp_of(values: &[f64], p: SchattenP) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    match p {
        SchattenP::Infinity => max,
        SchattenP::Finite(p) => {
            if max == 0.0 {
                return 0.0;
            }
            let s: f64 = values.iter().map(|v| (v / max).powf(p)).sum();
            max * s.powf(1.0 / p)
        }
    }
}

pub fn schatten_norm(m: &DMatrix<Complex64>, p: SchattenP) -> Result<f64> {
    if let SchattenP::Finite(v) = p {
        SchattenP::new(v)?;
    }
    Ok(lp_of(&singular_values(m)?.values, p))
}

pub fn operator_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    schatten_norm(m, SchattenP::Infinity)
}

/// `sum_n ||M f_n||^p` over the columns of `basis`, which must be orthonormal.
pub fn onb_power_sum(m: &DMatrix<Complex64>, basis: &DMatrix<Complex64>, p: f64) -> Result<f64> {
    check_p_above_two(p)?;
    let gram = basis.adjoint() * basis;
    let dev = (gram - DMatrix::<Complex64>::identity(basis.ncols(), basis.ncols()))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if dev > ONB_TOL {
        return Err(Error::NotAFrame(format!("columns are not orthonormal (deviation {dev:.3e})")));
    }
    power_sum(m, basis, p)
}

/// `sum_n ||M f_n||^p` over a frame whose upper frame bound is at most 1,
/// the setting in which the sum never exceeds `||M||_{S_p}^p`.
pub fn frame_power_sum(m: &DMatrix<Complex64>, frame: &DMatrix<Complex64>, p: f64) -> Result<f64> {
    check_p_above_two(p)?;
    let fb = frame_bounds(frame)?;
    if fb.upper > 1.0 + ONB_TOL {
        return Err(Error::NotAFrame(format!("upper frame bound {} exceeds 1", fb.upper)));
    }
    power_sum(m, frame, p)
}

fn check_p_above_two(p: f64) -> Result<()> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("power sums need 2 < p < inf, got {p}")));
    }
    Ok(())
}

fn power_sum(m: &DMatrix<Complex64>, vectors: &DMatrix<Complex64>, p: f64) -> Result<f64> {
    if m.ncols() != vectors.nrows() {
        return Err(Error::Dimension(format!("matrix has {} columns, vectors have length {}", m.ncols(), vectors.nrows())));
    }
    check_finite(m)?;
    let images = m * vectors;
    Ok(images.column_iter().map(|c| c.norm().powf(p)).sum())
}

/// Optimal frame bounds of the columns: extreme eigenvalues of `sum f f^*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    /// False when the vectors do not span the space (`lower` is then 0).
    pub spanning: bool,
}

pub fn frame_bounds(vectors: &DMatrix<Complex64>) -> Result<FrameBounds> {
    if vectors.is_empty() {
        return Err(Error::Empty("frame".into()));
    }
    check_finite(vectors)?;
    let op = vectors * vectors.adjoint();
    let eig = SymmetricEigen::new(op);
    let upper = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let spanning = lower > 1e-12 * upper.max(1.0);
    Ok(FrameBounds { lower: if spanning { lower } else { 0.0 }, upper, spanning })
}

/// Right singular vectors of `M` as columns, ordered like the singular values.
pub fn right_singular_vectors(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    check_finite(m)?;
    let eig = SymmetricEigen::new(m.adjoint() * m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    Ok(DMatrix::from_fn(m.ncols(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]))
}
