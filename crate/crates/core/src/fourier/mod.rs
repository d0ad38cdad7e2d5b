//! Operator-valued group Fourier transform in the scaled Hermite basis.

mod calibrate;
mod field;
mod grid;
mod rep;
mod transform;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hermite::SpectralParameter;

pub use calibrate::{
    calibrate, dilation_covariance_residual, fit_constants, Calibration, CalibrationConstants, CalibrationSample,
};
pub use field::{invert, plancherel_sum, FourierField};
pub use grid::{LambdaGrid, LambdaGridSpec};
pub use rep::{cutoff_for_len, matrix_element_table, rep_apply, rep_matrix, rep_quadrature_nodes};
pub use transform::{gft, partial_central_fourier, FourierEngine};

/// Node counts for the transform quadrature.
///
/// `(p, q, t)` use the uniform trapezoid rule on the function's decay box,
/// which converges geometrically for the smooth oscillatory integrands here;
/// `xi` uses Gauss-Hermite nodes in the scaled variable `sqrt(eta) xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierQuad {
    pub pq_nodes: usize,
    pub t_nodes: usize,
    #[serde(default)]
    pub xi_nodes: Option<usize>,
}

impl Default for FourierQuad {
    fn default() -> Self {
        Self { pq_nodes: 96, t_nodes: 64, xi_nodes: None }
    }
}

impl FourierQuad {
    pub fn xi_nodes_for(&self, cutoff: usize) -> usize {
        self.xi_nodes.unwrap_or((2 * cutoff + 40).max(64))
    }

    /// Twice the nodes on every axis.
    pub fn doubled(&self) -> Self {
        Self { pq_nodes: 2 * self.pq_nodes, t_nodes: 2 * self.t_nodes, xi_nodes: self.xi_nodes.map(|x| 2 * x) }
    }
}

/// Quadrature metadata attached to every computed matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadMeta {
    pub pq_nodes: usize,
    pub t_nodes: usize,
    pub xi_nodes: usize,
    pub v_half: f64,
    pub t_half: f64,
}

/// Truncated matrix of `F(f)(lambda)`: entry `(gamma, alpha)` is
/// `<F(f)(lambda) Phi_alpha, Phi_gamma>` over `|alpha|, |gamma| <= cutoff` in
/// the canonical multi-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    pub sp: SpectralParameter,
    pub cutoff: usize,
    pub entries: DMatrix<Complex64>,
    pub meta: Option<QuadMeta>,
}

impl SpectralOperator {
    pub fn identity(sp: SpectralParameter, cutoff: usize) -> Self {
        let d = crate::hermite::basis_dim(sp.n(), cutoff);
        Self { sp, cutoff, entries: DMatrix::identity(d, d), meta: None }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Squared Hilbert-Schmidt norm.
    pub fn hs_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}
