//! Property tests for structural invariants.

use hpw_core::functions::{Gaussian, GroupFunction};
use hpw_core::group::{dilate, hom_norm, inverse, GroupDescriptor, GroupPoint};
use hpw_core::hermite::{zeta, MultiIndex, SpectralParameter};
use hpw_core::hpw::{frequency_count, InequalityConfig};
use hpw_core::schatten::{schatten_norm, singular_values, SchattenP};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn groups() -> Vec<GroupDescriptor> {
    vec![
        GroupDescriptor::heisenberg(1).unwrap(),
        GroupDescriptor::heisenberg(2).unwrap(),
        GroupDescriptor::quaternionic(),
    ]
}

fn point(g: &GroupDescriptor, c: &[f64]) -> GroupPoint {
    let n = g.n();
    GroupPoint::new(c[..n].to_vec(), c[n..2 * n].to_vec(), c[2 * n..2 * n + g.k()].to_vec()).unwrap()
}

fn close(a: &GroupPoint, b: &GroupPoint, tol: f64) -> bool {
    a.p.iter().chain(&a.q).chain(&a.t).zip(b.p.iter().chain(&b.q).chain(&b.t)).all(|(x, y)| (x - y).abs() <= tol)
}

fn coords() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 7)
}

fn matrix(d: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
        .prop_map(move |v| DMatrix::from_iterator(d, d, v.into_iter().map(|(a, b)| Complex64::new(a, b))))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn group_law_axioms(gi in 0usize..3, a in coords(), b in coords(), c in coords(), r in 0.05f64..5.0) {
        let g = &groups()[gi];
        let (a, b, c) = (point(g, &a), point(g, &b), point(g, &c));
        let lhs = g.multiply(&g.multiply(&a, &b).unwrap(), &c).unwrap();
        let rhs = g.multiply(&a, &g.multiply(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
        prop_assert!(close(&g.multiply(&a, &inverse(&a)).unwrap(), &g.identity(), 1e-14));
        prop_assert!(close(&g.multiply(&g.identity(), &a).unwrap(), &a, 0.0));
        let dl = dilate(&g.multiply(&a, &b).unwrap(), r).unwrap();
        let dr = g.multiply(&dilate(&a, r).unwrap(), &dilate(&b, r).unwrap()).unwrap();
        prop_assert!(close(&dl, &dr, 1e-11 * r.max(1.0).powi(2)));
    }

    #[test]
    fn homogeneous_norm(gi in 0usize..3, a in coords(), r in 0.05f64..5.0) {
        let g = &groups()[gi];
        let a = point(g, &a);
        let na = hom_norm(&a);
        prop_assert!((hom_norm(&dilate(&a, r).unwrap()) - r * na).abs() <= 1e-13 * r * na.max(1.0));
        prop_assert_eq!(hom_norm(&inverse(&a)), na);
        prop_assert!(na >= 0.0);
    }

    #[test]
    fn frequencies_are_homogeneous(gi in 0usize..3, l in prop::collection::vec(-4.0f64..4.0, 3), s in 0.1f64..10.0) {
        let g = &groups()[gi];
        let lam: Vec<f64> = l[..g.k()].to_vec();
        prop_assume!(lam.iter().map(|x| x * x).sum::<f64>() > 1e-6);
        let sp = SpectralParameter::new(g, &lam).unwrap();
        let scaled: Vec<f64> = lam.iter().map(|x| s * x).collect();
        let sp2 = SpectralParameter::new(g, &scaled).unwrap();
        for (a, b) in sp.eta.iter().zip(&sp2.eta) {
            prop_assert!((b - s * a).abs() <= 1e-12 * s * a);
        }
        // H-type: every eta equals |lambda| and Pf = |lambda|^n
        let norm = sp.lambda_norm();
        for e in &sp.eta {
            prop_assert!((e - norm).abs() <= 1e-12 * norm);
        }
        prop_assert!((sp.pfaffian / norm.powi(g.n() as i32) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn eigenvalue_bounds(alpha in prop::collection::vec(0usize..15, 2), l in 0.01f64..20.0) {
        let g = GroupDescriptor::heisenberg(2).unwrap();
        let sp = SpectralParameter::new(&g, &[l]).unwrap();
        let a = MultiIndex::new(alpha);
        let q = zeta(&a, &sp) / ((a.order() + 2) as f64 * l);
        prop_assert!((1.0..=2.0).contains(&q));
    }

    #[test]
    fn frequency_count_is_monotone(l in 0.05f64..5.0, r1 in 0.0f64..40.0, dr in 0.0f64..10.0) {
        let g = GroupDescriptor::heisenberg(2).unwrap();
        let sp = SpectralParameter::new(&g, &[l]).unwrap();
        prop_assert!(frequency_count(&sp, r1) <= frequency_count(&sp, r1 + dr));
    }

    #[test]
    fn gaussian_dilation_and_scaling(a in 0.1f64..2.0, b in 0.1f64..2.0, x in coords(), r in 0.2f64..4.0, c in -3.0f64..3.0) {
        prop_assume!(c.abs() > 1e-3);
        let g = GroupDescriptor::heisenberg(1).unwrap();
        let f = Gaussian::new(&g, a, b).unwrap();
        let x = point(&g, &x);
        let lhs = f.clone().dilated(r).unwrap().scaled(c).eval(&x);
        let rhs = f.eval(&dilate(&x, 1.0 / r).unwrap()) * c;
        prop_assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + rhs.norm()));
        // ||c f o delta_{1/r}||_p^p = |c|^p r^Q ||f||_p^p
        let p = 1.5;
        let scaled = f.clone().dilated(r).unwrap().scaled(c).lp_norm_pow(p);
        prop_assert!((scaled / (c.abs().powf(p) * r.powi(4) * f.lp_norm_pow(p)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schatten_invariants(m in matrix(5), o in matrix(5), p in 1.0f64..6.0, s in -3.0f64..3.0) {
        let sp = SchattenP::Finite(p);
        let n = schatten_norm(&m, sp).unwrap();
        prop_assert!((schatten_norm(&m.adjoint(), sp).unwrap() - n).abs() <= 1e-12 * n.max(1.0));
        prop_assert!((schatten_norm(&(&m * Complex64::new(s, 0.0)), sp).unwrap() - s.abs() * n).abs() <= 1e-12 * n.max(1.0));
        prop_assert!(schatten_norm(&(&m + &o), sp).unwrap() <= n + schatten_norm(&o, sp).unwrap() + 1e-12);
        let inf = schatten_norm(&m, SchattenP::Infinity).unwrap();
        prop_assert!(inf <= n * (1.0 + 1e-12));
        prop_assert!(n <= schatten_norm(&m, SchattenP::Finite(1.0)).unwrap() * (1.0 + 1e-12));
        let sv = singular_values(&m).unwrap();
        prop_assert!(sv.values.windows(2).all(|w| w[0] >= w[1]) || sv.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn admissibility_threshold(p in 1.0f64..1.99, beta in 0.01f64..10.0, gamma in 0.01f64..5.0) {
        let q = 4;
        let ok = InequalityConfig::new(q, p, beta, gamma).is_ok();
        prop_assert_eq!(ok, beta > q as f64 * (1.0 / p - 0.5));
    }
}
