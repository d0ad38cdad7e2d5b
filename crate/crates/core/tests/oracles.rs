//! Library results against closed forms computed independently here.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use hpw_core::fourier::{gft, CalibrationConstants, FourierField, FourierQuad, LambdaGridSpec};
use hpw_core::functions::{Gaussian, GroupFunction};
use hpw_core::group::{haar_integral, GroupDescriptor, HaarResolution};
use hpw_core::hermite::{hermite_eval, SpectralParameter};
use hpw_core::hpw::{fourier_term_p1, weighted_lp_norm, HpwEvaluator, HpwSetup};
use hpw_core::quadrature::{gauss_hermite_nodes, gauss_legendre};
use hpw_core::schatten::{schatten_norm, SchattenP};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn h1() -> GroupDescriptor {
    GroupDescriptor::heisenberg(1).unwrap()
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Physicists' Hermite polynomial by its explicit sum.
fn hermite_poly(m: usize, x: f64) -> f64 {
    (0..=m / 2)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(m) / (factorial(j) * factorial(m - 2 * j)) * (2.0 * x).powi((m - 2 * j) as i32)
        })
        .sum()
}

#[test]
fn hermite_functions_match_explicit_polynomials() {
    for m in 0..=8 {
        let norm = ((2f64).powi(m as i32) * factorial(m) * PI.sqrt()).sqrt();
        for &x in &[-3.1, -0.7, 0.0, 0.4, 2.2, 5.0] {
            let expect = hermite_poly(m, x) * (-x * x / 2.0).exp() / norm;
            assert_relative_eq!(hermite_eval(m, x), expect, epsilon = 1e-13, max_relative = 1e-11);
        }
    }
}

#[test]
fn gauss_hermite_integrates_even_moments() {
    let rule = gauss_hermite_nodes(24).unwrap();
    for j in 0..24 {
        let exact = gamma_half(j);
        let got: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(2 * j as i32)).sum();
        assert_relative_eq!(got, exact, max_relative = 1e-12);
    }
}

/// `Gamma(j + 1/2) = (2j)! sqrt(pi) / (4^j j!)`.
fn gamma_half(j: usize) -> f64 {
    factorial(2 * j) * PI.sqrt() / (4f64.powi(j as i32) * factorial(j))
}

#[test]
fn gauss_legendre_is_exact_for_polynomials() {
    let rule = gauss_legendre(12, -1.0, 2.0);
    for d in 0..24 {
        let exact = (2f64.powi(d + 1) - (-1f64).powi(d + 1)) / (d + 1) as f64;
        assert_relative_eq!(rule.integrate(|x| x.powi(d)), exact, max_relative = 1e-13);
    }
}

#[test]
fn gaussian_lp_norms_by_quadrature() {
    let g = h1();
    let (a, b) = (0.7, 0.3);
    let f = Gaussian::new(&g, a, b).unwrap();
    let haar = HaarResolution { v_nodes: 80, t_nodes: 80, ..Default::default() };
    for p in [1.0, 1.5, 2.0, 3.0] {
        let exact = (PI / (p * a)) * (PI / (p * b)).sqrt();
        let quad = haar_integral(&g, |x| Complex64::new(f.eval(x).norm().powf(p), 0.0), &f.decay_box(), &haar).unwrap();
        assert_relative_eq!(quad.value.re, exact, max_relative = 1e-9);
        assert_relative_eq!(f.lp_norm_pow(p), exact, max_relative = 1e-12);
    }
}

#[test]
fn weighted_norm_with_polynomial_weight() {
    // |x|^4 = |v|^4 + t^2, so gamma = 2, p = 2 reduces to Gaussian moments
    let g = h1();
    let (a, b) = (0.5, 0.8);
    let f = Gaussian::new(&g, a, b).unwrap();
    let (c, d) = (2.0 * a, 2.0 * b);
    let exact = 2.0 * PI / c.powi(3) * (PI / d).sqrt() + PI / c * PI.sqrt() / (2.0 * d.powf(1.5));
    let coarse = weighted_lp_norm(&g, &f, 2.0, 2.0, &HaarResolution::default()).unwrap();
    let fine = weighted_lp_norm(&g, &f, 2.0, 2.0, &HaarResolution { v_nodes: 80, t_nodes: 80, ..Default::default() }).unwrap();
    assert_relative_eq!(coarse, exact.sqrt(), max_relative = 1e-5);
    assert_relative_eq!(fine, exact.sqrt(), max_relative = 1e-9);
}

#[test]
fn fourier_transform_of_gaussian_diagonal_entries() {
    // <pi_lambda(x) Phi_m, Phi_m> = e^{i lambda t} e^{-eta |v|^2 / 4} L_m(eta |v|^2 / 2)
    let g = h1();
    let (a, b) = (0.5, 0.5);
    let f = Gaussian::new(&g, a, b).unwrap();
    let quad = FourierQuad::default();
    for lam in [-2.0, 0.5, 3.0] {
        let sp = SpectralParameter::new(&g, &[lam]).unwrap();
        let m = gft(&g, &f, &sp, 4, &quad).unwrap();
        let eta = lam.abs();
        let c = a + eta / 4.0;
        let central = (PI / b).sqrt() * (-lam * lam / (4.0 * b)).exp();
        let f00 = central * PI / c;
        let f11 = central * (PI / c - eta / 2.0 * PI / (c * c));
        assert_relative_eq!(m.entries[(0, 0)].re, f00, max_relative = 1e-8);
        assert_relative_eq!(m.entries[(1, 1)].re, f11, max_relative = 1e-8, epsilon = 1e-12);
        // rotation invariance makes the transform diagonal
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                if i != j {
                    assert!(m.entries[(i, j)].norm() < 1e-9 * f00);
                }
            }
        }
    }
}

#[test]
fn plancherel_constant_approaches_its_analytic_value() {
    // with dZ = dt and |Pf| = |lambda| the exact constant on H^1 is (2 pi)^{-2}
    let g = h1();
    let f = Gaussian::new(&g, 0.5, 0.5).unwrap();
    let exact = (2.0 * PI).powi(-2);
    let grid = LambdaGridSpec::default();
    let err = |cutoff: usize| {
        let field = FourierField::build_adapted(&g, &f, &grid, cutoff, &FourierQuad::default()).unwrap();
        let c = f.lp_norm_pow(2.0) / field.raw_plancherel();
        (c / exact - 1.0).abs()
    };
    let (e10, e20, e40) = (err(10), err(20), err(40));
    assert!(e20 < e10 && e40 < e20, "{e10} {e20} {e40}");
    assert!(e40 < 0.02, "{e40}");
}

#[test]
fn sup_operator_norm_at_beta_zero_tends_to_l1_norm() {
    // for a positive function the top of ||F(f)(lambda)||_op is int f, reached as lambda -> 0
    let g = h1();
    let f = Gaussian::new(&g, 0.5, 0.5).unwrap();
    let field = FourierField::build_adapted(&g, &f, &LambdaGridSpec::default(), 12, &FourierQuad::default()).unwrap();
    let sup = fourier_term_p1(&field, 0.0).unwrap().value;
    let l1 = f.lp_norm(1.0);
    assert!(sup <= l1 * (1.0 + 1e-9));
    assert!(sup > 0.99 * l1, "{sup} vs {l1}");
}

#[test]
fn hausdorff_young_ratio_tends_to_one_at_two() {
    let g = h1();
    let f = Gaussian::new(&g, 0.5, 0.5).unwrap();
    let field = FourierField::build_adapted(&g, &f, &LambdaGridSpec::default(), 20, &FourierQuad::default()).unwrap();
    let c = f.lp_norm_pow(2.0) / field.raw_plancherel();
    let consts = CalibrationConstants { plancherel_c: c, inversion_kappa: c };
    let ev = HpwEvaluator::with_field(&g, &f, HpwSetup::default().calibrated(&consts), field);
    let near_two = ev.hausdorff_young_ratio(1.999).unwrap();
    assert_relative_eq!(near_two, 1.0, max_relative = 2e-3);
    for p in [1.2, 1.5, 1.8] {
        let r = ev.hausdorff_young_ratio(p).unwrap();
        assert!(r > 0.0 && r <= 1.0 + 1e-9, "p = {p}: {r}");
    }
}

#[test]
fn schatten_norms_of_diagonal_matrices() {
    let d = [3.0, -1.5, 0.25, 2.0];
    let m = DMatrix::from_fn(4, 4, |i, j| if i == j { Complex64::new(0.0, d[i]) } else { Complex64::new(0.0, 0.0) });
    for p in [1.0, 2.0, 3.5] {
        let exact = d.iter().map(|x: &f64| x.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        assert_relative_eq!(schatten_norm(&m, SchattenP::Finite(p)).unwrap(), exact, max_relative = 1e-12);
    }
    assert_relative_eq!(schatten_norm(&m, SchattenP::Infinity).unwrap(), 3.0, max_relative = 1e-12);
}
