//! Fitting the Plancherel and inversion constants, and the dilation
//! covariance check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FourierEngine, FourierField, FourierQuad, LambdaGridSpec};
use crate::error::{Error, Result};
use crate::functions::{Dilated, GroupFunction};
use crate::group::{haar_integral, GroupDescriptor, HaarResolution};
use crate::hermite::SpectralParameter;

/// Largest relative residual accepted by [`calibrate`].
pub const MAX_CALIBRATION_RESIDUAL: f64 = 0.05;

/// `C` in `||f||_2^2 = C int ||F(f)||_{S_2}^2 |Pf| d lambda` and `kappa` in
/// `f(x) = kappa int tr(pi_lambda(x)^* F(f)(lambda)) |Pf| d lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConstants {
    pub plancherel_c: f64,
    pub inversion_kappa: f64,
}

impl CalibrationConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.plancherel_c > 0.0 && self.inversion_kappa > 0.0)
            || !self.plancherel_c.is_finite()
            || !self.inversion_kappa.is_finite()
        {
            return Err(Error::Calibration("constants must be finite and positive".into()));
        }
        Ok(())
    }
}

/// Per-function inputs to the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSample {
    /// Oracle `||f||_2^2` from direct Haar quadrature.
    pub norm_sq: f64,
    /// `sum_i w_i ||M_i||_{S_2}^2`.
    pub raw_plancherel: f64,
    /// Oracle `f(e)`.
    pub value_at_e: Complex64,
    /// `sum_i w_i tr(M_i)`.
    pub raw_inversion: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub constants: CalibrationConstants,
    /// Max over the family of `|1 - C raw / ||f||^2|`.
    pub plancherel_residual: f64,
    /// Max over the family of `|1 - kappa raw / f(e)|`.
    pub inversion_residual: f64,
    pub samples: Vec<CalibrationSample>,
}

/// Least-squares fit of relative residuals: `C = sum x_j / sum x_j^2` with
/// `x_j = raw_j / ||f_j||^2`, and likewise for `kappa`.
pub fn fit_constants(samples: &[CalibrationSample]) -> Result<Calibration> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "calibration needs at least 3 functions, got {}",
            samples.len()
        )));
    }
    let usable: Vec<&CalibrationSample> = samples.iter().filter(|s| s.norm_sq > 0.0).collect();
    if usable.is_empty() {
        return Err(Error::Calibration("degenerate family: every function vanishes".into()));
    }
    let xs: Vec<f64> = usable.iter().map(|s| s.raw_plancherel / s.norm_sq).collect();
    let c = xs.iter().sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>();
    let plancherel_residual = xs.iter().map(|x| (1.0 - c * x).abs()).fold(0.0, f64::max);

    let peak = usable.iter().map(|s| s.value_at_e.norm()).fold(0.0, f64::max);
    let ys: Vec<Complex64> = usable
        .iter()
        .filter(|s| s.value_at_e.norm() > 1e-8 * peak && peak > 0.0)
        .map(|s| s.raw_inversion / s.value_at_e)
        .collect();
    if ys.is_empty() {
        return Err(Error::Calibration("no family member is nonzero at the identity".into()));
    }
    let kappa = ys.iter().map(|y| y.re).sum::<f64>() / ys.iter().map(|y| y.norm_sqr()).sum::<f64>();
    let inversion_residual = ys.iter().map(|y| (1.0 - kappa * y).norm()).fold(0.0, f64::max);

    let constants = CalibrationConstants { plancherel_c: c, inversion_kappa: kappa };
    constants.validate()?;
    Ok(Calibration { constants, plancherel_residual, inversion_residual, samples: samples.to_vec() })
}

/// Builds a field for every family member (grid adapted to each member's
/// natural scale), computes the oracles by Haar quadrature and fits the
/// constants. Fails when either residual exceeds 5%.
pub fn calibrate(
    g: &GroupDescriptor,
    family: &[&dyn GroupFunction],
    grid: &LambdaGridSpec,
    cutoff: usize,
    quad: &FourierQuad,
    haar: &HaarResolution,
) -> Result<Calibration> {
    if family.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "calibration needs at least 3 functions, got {}",
            family.len()
        )));
    }
    let mut samples = Vec::with_capacity(family.len());
    for f in family {
        let field = FourierField::build_adapted(g, *f, grid, cutoff, quad)?;
        let norm = haar_integral(g, |x| num_complex::Complex64::new(f.eval(x).norm_sqr(), 0.0), &f.decay_box(), haar)?;
        let e = g.identity();
        samples.push(CalibrationSample {
            norm_sq: norm.value.re,
            raw_plancherel: field.raw_plancherel(),
            value_at_e: f.eval(&e),
            raw_inversion: field.raw_inversion(&e)?,
        });
    }
    let cal = fit_constants(&samples)?;
    let worst = cal.plancherel_residual.max(cal.inversion_residual);
    if worst > MAX_CALIBRATION_RESIDUAL {
        return Err(Error::Calibration(format!(
            "residual {worst:.3e} exceeds {MAX_CALIBRATION_RESIDUAL}"
        )));
    }
    Ok(cal)
}

/// `max |M[delta_r f](lambda) - r^{-Q} M[f](lambda / r^2)|` with both sides
/// computed by the transform on dilation-matched quadrature boxes.
pub fn dilation_covariance_residual(
    g: &GroupDescriptor,
    f: &dyn GroupFunction,
    r: f64,
    lambda: &[f64],
    cutoff: usize,
    quad: &FourierQuad,
) -> Result<f64> {
    let dil = Dilated::new(f, r)?;
    let sp = SpectralParameter::new(g, lambda)?;
    let scaled: Vec<f64> = lambda.iter().map(|l| l / (r * r)).collect();
    let sp_scaled = SpectralParameter::new(g, &scaled)?;
    let lhs = FourierEngine::new(g, &dil, *quad)?.transform(&sp, cutoff)?;
    let rhs = FourierEngine::new(g, f, *quad)?.transform(&sp_scaled, cutoff)?;
    let factor = r.powi(-(g.homogeneous_dim() as i32));
    Ok(lhs
        .entries
        .iter()
        .zip(rhs.entries.iter())
        .map(|(a, b)| (a - b * factor).norm())
        .fold(0.0, f64::max))
}
