//! Both sides of the L^p Heisenberg-Pauli-Weyl inequalities, spectral tail
//! estimates, Hausdorff-Young ratios and constant estimation.
//!
//! For `1 <= p < 2`, `gamma > 0` and `beta > Q (1/p - 1/2)` the inequality
//! reads `||f||_p^{gamma + beta} <= C ||(|x|^gamma) f||_p^beta * F^gamma`,
//! where the Fourier factor `F` is `sup_lambda ||F(f)(lambda) H^{beta/2}||_op`
//! for `p = 1` and `(int ||F(f)(lambda) H^{beta/2}||_{S_p'}^{p'} |Pf| dlambda)^{1/p'}`
//! otherwise. The ratio `rhs / lhs` (without `C`) is what this module reports.

mod optimize;
mod tails;

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::fourier::{CalibrationConstants, FourierField, FourierQuad, LambdaGridSpec};
use crate::functions::GroupFunction;
use crate::group::{haar_integral, hom_norm, GroupDescriptor, HaarResolution};
use crate::hermite::apply_h_power;
use crate::schatten::{lp_of, operator_norm, singular_values, SchattenP};

pub use optimize::{estimate_constant, EstimateReport, GaussianFamily, NelderMeadOptions, TrajectoryPoint};
pub use tails::{
    count_scaling_exponent, frequency_count, frequency_count_measure, spectral_tail_mass, tail_bound_check, TailRow,
    TailSide, TailTable,
};

/// Exponents of one inequality; admissibility is checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityConfig {
    pub p: f64,
    pub gamma: f64,
    pub beta: f64,
    /// `p / (p - 1)`; `None` stands for infinity (`p = 1`).
    pub p_conj: Option<f64>,
}

impl InequalityConfig {
    /// `q_dim` is the homogeneous dimension `Q`.
    pub fn new(q_dim: usize, p: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(1.0..2.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p must lie in [1, 2), got {p}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        let edge = Self::beta_threshold(q_dim, p);
        if !(beta > edge) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta = {beta} is not above Q (1/p - 1/2) = {edge}")));
        }
        let p_conj = if p == 1.0 { None } else { Some(p / (p - 1.0)) };
        Ok(Self { p, gamma, beta, p_conj })
    }

    pub fn for_group(g: &GroupDescriptor, p: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(g.homogeneous_dim(), p, beta, gamma)
    }

    /// `Q (1/p - 1/2)`; admissible `beta` lie strictly above it.
    pub fn beta_threshold(q_dim: usize, p: f64) -> f64 {
        q_dim as f64 * (1.0 / p - 0.5)
    }

    pub fn p_conj_value(&self) -> f64 {
        self.p_conj.unwrap_or(f64::INFINITY)
    }
}

/// Numerical settings shared by every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpwSetup {
    pub cutoff: usize,
    pub grid: LambdaGridSpec,
    pub quad: FourierQuad,
    pub haar: HaarResolution,
    /// Factor applied to the field weights in every frequency integral; the
    /// Plancherel constant `C` gives the calibrated measure.
    pub measure_scale: f64,
}

impl Default for HpwSetup {
    fn default() -> Self {
        Self {
            cutoff: 20,
            grid: LambdaGridSpec::default(),
            quad: FourierQuad::default(),
            haar: HaarResolution::default(),
            measure_scale: 1.0,
        }
    }
}

impl HpwSetup {
    pub fn calibrated(mut self, consts: &CalibrationConstants) -> Self {
        self.measure_scale = consts.plancherel_c;
        self
    }
}

/// `|| |x|^gamma f ||_p` by Haar quadrature on the function's decay box.
pub fn weighted_lp_norm(
    g: &GroupDescriptor,
    f: &dyn GroupFunction,
    gamma: f64,
    p: f64,
    haar: &HaarResolution,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
    }
    let res = haar_integral(
        g,
        |x| {
            let v = f.eval(x).norm();
            let w = if gamma == 0.0 { v } else { hom_norm(x).powf(gamma) * v };
            Complex64::new(w.powf(p), 0.0)
        },
        &f.decay_box(),
        haar,
    )?;
    ensure_finite(res.value.re.max(0.0).powf(1.0 / p), "weighted L^p norm")
}

/// Grid supremum of the p = 1 Fourier factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupTerm {
    pub value: f64,
    /// Node attaining the maximum.
    pub lambda: Vec<f64>,
    pub index: usize,
}

/// `max_i ||M_i H(eta(lambda_i))^{beta/2}||_op` over the field's nodes.
pub fn fourier_term_p1(field: &FourierField, beta: f64) -> Result<SupTerm> {
    if field.is_empty() {
        return Err(Error::Empty("Fourier field".into()));
    }
    let norms = field
        .ops
        .par_iter()
        .map(|m| operator_norm(&apply_h_power(m, 0.5 * beta).entries))
        .collect::<Result<Vec<_>>>()?;
    let (index, value) = norms
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    Ok(SupTerm { value, lambda: field.nodes[index].lambda.clone(), index })
}

/// `sum_i w_i ||M_i H(eta(lambda_i))^{beta/2}||_{S_p'}^{p'}` (before the
/// `1/p'` root), using the field's own weights.
pub fn fourier_term_lp(field: &FourierField, beta: f64, p_conj: f64) -> Result<f64> {
    if !(p_conj > 2.0) || !p_conj.is_finite() {
        return Err(Error::InvalidParameter(format!("p' must satisfy 2 < p' < inf, got {p_conj}")));
    }
    let terms = field
        .ops
        .par_iter()
        .zip(&field.weights)
        .map(|(m, w)| {
            let s = singular_values(&apply_h_power(m, 0.5 * beta).entries)?;
            Ok(w * lp_of(&s.values, SchattenP::Finite(p_conj)).powf(p_conj))
        })
        .collect::<Result<Vec<_>>>()?;
    ensure_finite(terms.iter().sum(), "Fourier L^p' term")
}

/// Settings a report was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub cutoff: usize,
    pub grid: LambdaGridSpec,
    pub quad: FourierQuad,
    pub haar: HaarResolution,
    pub measure_scale: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpwReport {
    pub config: InequalityConfig,
    pub norm_p: f64,
    pub weighted_norm: f64,
    /// The Fourier factor before raising to `gamma`.
    pub fourier_factor: f64,
    /// `||f||_p^{gamma + beta}`.
    pub lhs: f64,
    /// `|| |x|^gamma f ||_p^beta`.
    pub weight_term: f64,
    /// `fourier_factor^gamma`.
    pub fourier_term: f64,
    pub ratio: f64,
    /// Maximizing node of the p = 1 supremum.
    pub sup_lambda: Option<Vec<f64>>,
    pub meta: ReportMeta,
}

/// Evaluates reports for one function, building its Fourier field once and
/// caching the `L^p` norms.
pub struct HpwEvaluator<'a> {
    g: &'a GroupDescriptor,
    f: &'a dyn GroupFunction,
    setup: HpwSetup,
    field: FourierField,
    norms: Mutex<HashMap<(u64, u64), f64>>,
}

impl<'a> HpwEvaluator<'a> {
    /// Builds the field on the setup grid mapped to the function's natural scale.
    pub fn new(g: &'a GroupDescriptor, f: &'a dyn GroupFunction, setup: HpwSetup) -> Result<Self> {
        let field = FourierField::build_adapted(g, f, &setup.grid, setup.cutoff, &setup.quad)?;
        Ok(Self::with_field(g, f, setup, field))
    }

    pub fn with_field(g: &'a GroupDescriptor, f: &'a dyn GroupFunction, setup: HpwSetup, field: FourierField) -> Self {
        Self { g, f, setup, field, norms: Mutex::new(HashMap::new()) }
    }

    pub fn field(&self) -> &FourierField {
        &self.field
    }

    pub fn setup(&self) -> &HpwSetup {
        &self.setup
    }

    /// `|| |x|^gamma f ||_p`, cached.
    pub fn weighted_norm(&self, gamma: f64, p: f64) -> Result<f64> {
        let key = (gamma.to_bits(), p.to_bits());
        if let Some(v) = self.norms.lock().expect("norm cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = weighted_lp_norm(self.g, self.f, gamma, p, &self.setup.haar)?;
        self.norms.lock().expect("norm cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn norm_p(&self, p: f64) -> Result<f64> {
        self.weighted_norm(0.0, p)
    }

    /// The Fourier integral `A(f, beta)` on the scaled measure (before the root).
    pub fn fourier_integral(&self, beta: f64, p_conj: f64) -> Result<f64> {
        Ok(self.setup.measure_scale * fourier_term_lp(&self.field, beta, p_conj)?)
    }

    pub fn report(&self, cfg: &InequalityConfig) -> Result<HpwReport> {
        let norm_p = self.norm_p(cfg.p)?;
        if norm_p == 0.0 {
            return Err(Error::InvalidParameter("the function vanishes: ||f||_p = 0".into()));
        }
        let weighted_norm = self.weighted_norm(cfg.gamma, cfg.p)?;
        let (fourier_factor, sup_lambda) = match cfg.p_conj {
            None => {
                let s = fourier_term_p1(&self.field, cfg.beta)?;
                (s.value, Some(s.lambda))
            }
            Some(pc) => (self.fourier_integral(cfg.beta, pc)?.powf(1.0 / pc), None),
        };
        let lhs = norm_p.powf(cfg.gamma + cfg.beta);
        let weight_term = weighted_norm.powf(cfg.beta);
        let fourier_term = fourier_factor.powf(cfg.gamma);
        let ratio = ensure_finite(weight_term * fourier_term / lhs, "HPW ratio")?;
        Ok(HpwReport {
            config: *cfg,
            norm_p,
            weighted_norm,
            fourier_factor,
            lhs,
            weight_term,
            fourier_term,
            ratio,
            sup_lambda,
            meta: self.meta(),
        })
    }

    /// `(C int ||F(f)||_{S_p'}^{p'} |Pf| dlambda)^{1/p'} / ||f||_p` with `C`
    /// taken from the setup's measure scale.
    pub fn hausdorff_young_ratio(&self, p: f64) -> Result<f64> {
        if !(p > 1.0 && p < 2.0) {
            return Err(Error::InvalidParameter(format!("Hausdorff-Young ratio needs 1 < p < 2, got {p}")));
        }
        let norm = self.norm_p(p)?;
        if norm == 0.0 {
            return Err(Error::InvalidParameter("the function vanishes: ||f||_p = 0".into()));
        }
        let pc = p / (p - 1.0);
        Ok(self.fourier_integral(0.0, pc)?.powf(1.0 / pc) / norm)
    }

    pub fn meta(&self) -> ReportMeta {
        ReportMeta {
            cutoff: self.setup.cutoff,
            grid: self.setup.grid,
            quad: self.setup.quad,
            haar: self.setup.haar,
            measure_scale: self.setup.measure_scale,
            nodes: self.field.len(),
        }
    }
}

pub fn hpw_report(g: &GroupDescriptor, f: &dyn GroupFunction, cfg: &InequalityConfig, setup: &HpwSetup) -> Result<HpwReport> {
    HpwEvaluator::new(g, f, *setup)?.report(cfg)
}

pub fn hausdorff_young_ratio(g: &GroupDescriptor, f: &dyn GroupFunction, p: f64, setup: &HpwSetup) -> Result<f64> {
    HpwEvaluator::new(g, f, *setup)?.hausdorff_young_ratio(p)
}

/// The p = 1 supremum at half, equal and double nodes per panel, as a
/// sensitivity report for the grid maximum.
pub fn p1_refinement_sensitivity(
    g: &GroupDescriptor,
    f: &dyn GroupFunction,
    beta: f64,
    setup: &HpwSetup,
) -> Result<[f64; 3]> {
    let base = setup.grid;
    let coarse = LambdaGridSpec { nodes_per_panel: (base.nodes_per_panel / 2).max(1), ..base };
    let mut out = [0.0; 3];
    for (slot, grid) in out.iter_mut().zip([coarse, base, base.refined()]) {
        let field = FourierField::build_adapted(g, f, &grid, setup.cutoff, &setup.quad)?;
        *slot = fourier_term_p1(&field, beta)?.value;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{FnFunction, Gaussian};
    use crate::group::HaarBox;

    fn h1() -> GroupDescriptor {
        GroupDescriptor::heisenberg(1).unwrap()
    }

    #[test]
    fn admissibility_gate() {
        assert!(InequalityConfig::new(4, 1.0, 2.0, 1.0).is_err());
        assert!(InequalityConfig::new(4, 1.0, 2.0001, 1.0).is_ok());
        assert!(InequalityConfig::new(4, 1.5, 1.0, 0.0).is_err());
        assert!(InequalityConfig::new(4, 2.0, 1.0, 1.0).is_err());
        let c = InequalityConfig::new(4, 1.5, 1.0, 1.0).unwrap();
        assert!((c.p_conj_value() - 3.0).abs() < 1e-15);
        assert_eq!(InequalityConfig::new(4, 1.0, 3.0, 1.0).unwrap().p_conj_value(), f64::INFINITY);
    }

    #[test]
    fn weighted_norm_examples() {
        let g = h1();
        let f = Gaussian::new(&g, 0.5, 0.5).unwrap();
        let haar = HaarResolution::default();
        for p in [1.0, 1.5] {
            let v = weighted_lp_norm(&g, &f, 0.0, p, &haar).unwrap();
            assert!((v / f.lp_norm(p) - 1.0).abs() < 1e-8, "p = {p}");
        }
        // |x|^4 = |v|^4 + t^2 against exp(-|v|^2/2 - t^2/2) with p = 1
        let w = weighted_lp_norm(&g, &f, 4.0, 1.0, &haar).unwrap();
        let pi = std::f64::consts::PI;
        let exact = 18.0 * pi * (2.0 * pi).sqrt();
        assert!((w / exact - 1.0).abs() < 1e-8, "{w} vs {exact}");
        let c = weighted_lp_norm(&g, &f.clone().scaled(-3.0), 1.0, 1.5, &haar).unwrap();
        let d = weighted_lp_norm(&g, &f, 1.0, 1.5, &haar).unwrap();
        assert!((c - 3.0 * d).abs() < 1e-12 * d);
        let zero = FnFunction::zero(HaarBox { v_half: 1.0, t_half: 1.0 });
        assert_eq!(weighted_lp_norm(&g, &zero, 1.0, 1.0, &haar).unwrap(), 0.0);
    }

    #[test]
    fn zero_field_terms() {
        let g = h1();
        let zero = FnFunction::zero(HaarBox { v_half: 3.0, t_half: 3.0 });
        let setup = HpwSetup { cutoff: 4, ..Default::default() };
        let field = FourierField::build(&g, &zero, &setup.grid, 4, &setup.quad).unwrap();
        assert_eq!(fourier_term_p1(&field, 3.0).unwrap().value, 0.0);
        assert_eq!(fourier_term_lp(&field, 1.0, 3.0).unwrap(), 0.0);
        assert!(fourier_term_lp(&field, 1.0, 2.0).is_err());
        let cfg = InequalityConfig::new(4, 1.5, 1.0, 1.0).unwrap();
        assert!(hpw_report(&g, &zero, &cfg, &setup).is_err());
    }
}
