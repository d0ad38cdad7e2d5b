//! Harmonic analysis on Heisenberg-type groups: group law and Haar
//! quadrature, scaled Hermite spectral theory, the operator-valued group
//! Fourier transform, Schatten norms, and numerical evaluation of the
//! L^p Heisenberg-Pauli-Weyl inequalities.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fourier;
pub mod functions;
pub mod group;
pub mod hpw;
pub mod hermite;
pub mod quadrature;
pub mod schatten;

pub use error::{Error, Result};
