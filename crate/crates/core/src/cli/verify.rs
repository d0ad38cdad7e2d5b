//! Verification suites behind `hpw verify`.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::commands::load_sidecar;
use super::config::RunConfig;
use super::output::{json_lines, write_atomic};
use super::CliError;
use crate::error::Result;
use crate::fourier::{
    calibrate, dilation_covariance_residual, gft, invert, plancherel_sum, CalibrationConstants, FourierField,
    LambdaGridSpec,
};
use crate::functions::{FnFunction, Gaussian, GroupFunction};
use crate::group::{dilate, haar_integral, hom_norm, inverse, quasi_triangle_constant, GroupDescriptor, GroupPoint};
use crate::hermite::{enumerate_multi_indices, hermite_all, hermite_eval, phi_alpha_eval, zeta, SpectralParameter};
use crate::hpw::{
    count_scaling_exponent, fourier_term_lp, fourier_term_p1, p1_refinement_sensitivity, spectral_tail_mass,
    tail_bound_check, HpwEvaluator, InequalityConfig, TailSide,
};
use crate::quadrature::gauss_hermite;
use crate::schatten::{frame_bounds, onb_power_sum, right_singular_vectors, schatten_norm, singular_values, SchattenP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Group,
    Hermite,
    Fourier,
    Schatten,
    Hpw,
    All,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "group" => Self::Group,
            "hermite" => Self::Hermite,
            "fourier" => Self::Fourier,
            "schatten" => Self::Schatten,
            "hpw" => Self::Hpw,
            "all" => Self::All,
            other => return Err(format!("unknown suite `{other}` (group, hermite, fourier, schatten, hpw, all)")),
        })
    }
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Self::Group => "group",
            Self::Hermite => "hermite",
            Self::Fourier => "fourier",
            Self::Schatten => "schatten",
            Self::Hpw => "hpw",
            Self::All => "all",
        }
    }

    fn needs_sidecar(self) -> bool {
        matches!(self, Self::Fourier | Self::Hpw | Self::All)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: String,
    pub check: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
    pub meta: serde_json::Value,
    pub seed: u64,
}

struct Recorder {
    suite: &'static str,
    seed: u64,
    out: Vec<CheckResult>,
}

impl Recorder {
    /// Records `value <= tolerance`.
    fn at_most(&mut self, check: &str, value: f64, tolerance: f64, meta: serde_json::Value) {
        let passed = value <= tolerance;
        self.push(check, passed, value, tolerance, format!("{value:.3e} <= {tolerance:e}"), meta);
    }

    fn push(&mut self, check: &str, passed: bool, value: f64, tolerance: f64, detail: String, meta: serde_json::Value) {
        self.out.push(CheckResult {
            suite: self.suite.into(),
            check: check.into(),
            passed,
            value,
            tolerance,
            detail,
            meta,
            seed: self.seed,
        });
    }
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, k: usize, scale: f64) -> GroupPoint {
    let mut v = |len: usize| (0..len).map(|_| rng.random_range(-scale..scale)).collect::<Vec<_>>();
    let p = v(n);
    let q = v(n);
    let t = v(k);
    GroupPoint { p, q, t }
}

/// Uniform in `{|v| <= 1} x {|t| <= 1}` by rejection.
fn point_in_unit_balls(rng: &mut ChaCha8Rng, n: usize, k: usize) -> GroupPoint {
    loop {
        let x = random_point(rng, n, k, 1.0);
        if x.v_norm_sq() <= 1.0 && x.t_norm_sq() <= 1.0 {
            return x;
        }
    }
}

fn max_diff(a: &GroupPoint, b: &GroupPoint) -> f64 {
    a.p.iter()
        .chain(&a.q)
        .chain(&a.t)
        .zip(b.p.iter().chain(&b.q).chain(&b.t))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn group_suite(cfg: &RunConfig, g: &GroupDescriptor, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let mut rec = Recorder { suite: "group", seed: cfg.seed, out: vec![] };
    let (n, k) = (g.n(), g.k());
    let samples = 10_000;
    let (mut assoc, mut inv, mut hom, mut norm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut pairs = Vec::new();
    for _ in 0..samples {
        let a = random_point(rng, n, k, 2.0);
        let b = random_point(rng, n, k, 2.0);
        let c = random_point(rng, n, k, 2.0);
        let r = rng.random_range(0.1..4.0);
        let ab_c = g.multiply(&g.multiply(&a, &b)?, &c)?;
        let a_bc = g.multiply(&a, &g.multiply(&b, &c)?)?;
        assoc = assoc.max(max_diff(&ab_c, &a_bc));
        inv = inv.max(max_diff(&g.multiply(&a, &inverse(&a))?, &g.identity()));
        let lhs = dilate(&g.multiply(&a, &b)?, r)?;
        let rhs = g.multiply(&dilate(&a, r)?, &dilate(&b, r)?)?;
        hom = hom.max(max_diff(&lhs, &rhs));
        let na = hom_norm(&a);
        norm = norm.max((hom_norm(&dilate(&a, r)?) - r * na).abs() / (r * na)).max((hom_norm(&inverse(&a)) - na).abs());
        pairs.push((a, b));
    }
    let meta = json!({ "samples": samples });
    rec.at_most("associativity", assoc, 1e-12, meta.clone());
    rec.at_most("inverse", inv, 1e-15, meta.clone());
    rec.at_most("dilation_homomorphism", hom, 1e-12, meta.clone());
    rec.at_most("norm_homogeneity_symmetry", norm, 1e-14, meta.clone());
    let c_half = quasi_triangle_constant(g, &pairs[..samples / 10])?;
    let c_full = quasi_triangle_constant(g, &pairs)?;
    let drift = (c_full / c_half - 1.0).abs();
    rec.push(
        "quasi_triangle_constant",
        c_full.is_finite() && drift <= 0.1,
        c_full,
        0.1,
        format!("C = {c_full:.4} ({} pairs), {c_half:.4} ({} pairs)", pairs.len(), samples / 10),
        meta,
    );

    let f = Gaussian::new(g, 0.5, 0.5)?;
    let dim = (2 * n + k) as f64;
    let exact = (2.0 * std::f64::consts::PI).powf(dim / 2.0);
    let base = haar_integral(g, |x| f.eval(x), &f.decay_box(), &cfg.haar)?;
    let hmeta = json!({ "haar": cfg.haar, "nodes": base.nodes, "shell_max": base.shell_max });
    rec.at_most("gaussian_integral", (base.value.re / exact - 1.0).abs(), 1e-8, hmeta.clone());
    for r in [0.5, 2.0] {
        let bx = f.decay_box().scaled(1.0 / r);
        let dil = haar_integral(g, |x| f.eval(&dilate(x, r).expect("r > 0")), &bx, &cfg.haar)?;
        let expect = r.powi(-(g.homogeneous_dim() as i32)) * base.value.re;
        rec.at_most(&format!("haar_homogeneity_r{r}"), (dil.value.re / expect - 1.0).abs(), 1e-6, hmeta.clone());
    }
    Ok(rec.out)
}

fn hermite_suite(cfg: &RunConfig, g: &GroupDescriptor, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let mut rec = Recorder { suite: "hermite", seed: cfg.seed, out: vec![] };
    let n = g.n();
    let idx = enumerate_multi_indices(n, 8);
    let gh = gauss_hermite(40);
    let mut lambda = vec![0.0; g.k()];
    let mut worst = 0.0f64;
    for l in [0.3, 1.0, -2.5] {
        lambda[0] = l;
        let sp = SpectralParameter::new(g, &lambda)?;
        let se: Vec<f64> = sp.eta.iter().map(|e| e.sqrt()).collect();
        let mut gram = DMatrix::<f64>::zeros(idx.len(), idx.len());
        let mut pos = vec![0usize; n];
        let mut vals = vec![0.0; idx.len()];
        loop {
            let xi: Vec<f64> = (0..n).map(|j| gh.nodes[pos[j]] / se[j]).collect();
            let w: f64 = (0..n).map(|j| gh.scaled_weights[pos[j]] / se[j]).product();
            for (i, a) in idx.iter().enumerate() {
                vals[i] = phi_alpha_eval(a, &sp, &xi)?;
            }
            for i in 0..idx.len() {
                for j in 0..idx.len() {
                    gram[(i, j)] += w * vals[i] * vals[j];
                }
            }
            let mut d = 0;
            while d < n {
                pos[d] += 1;
                if pos[d] < gh.len() {
                    break;
                }
                pos[d] = 0;
                d += 1;
            }
            if d == n {
                break;
            }
        }
        let dev = (gram - DMatrix::<f64>::identity(idx.len(), idx.len())).abs().max();
        worst = worst.max(dev);
    }
    rec.at_most("gram_matrix", worst, 1e-10, json!({ "cutoff": 8, "gh_nodes": gh.len(), "lambdas": [0.3, 1.0, -2.5] }));

    let h = 1e-4;
    let mut ode = 0.0f64;
    for _ in 0..200 {
        let tau = rng.random_range(-5.0..5.0);
        for m in 0..=20 {
            let d2 = (hermite_eval(m, tau + h) - 2.0 * hermite_eval(m, tau) + hermite_eval(m, tau - h)) / (h * h);
            let res = d2 - tau * tau * hermite_eval(m, tau) + (2 * m + 1) as f64 * hermite_eval(m, tau);
            ode = ode.max(res.abs());
        }
    }
    rec.at_most("ode_residual", ode, 1e-4, json!({ "step": h, "samples": 200, "max_order": 20 }));

    let mut buf = vec![0.0; 257];
    let mut finite = true;
    for i in 0..=800 {
        hermite_all(256, -40.0 + 0.1 * i as f64, &mut buf);
        finite &= buf.iter().all(|v| v.is_finite());
    }
    rec.push("no_overflow", finite, 0.0, 0.0, format!("orders <= 256, |tau| <= 40: finite = {finite}"), json!({}));

    let lg = cfg.grid.build(g.k())?;
    let all = enumerate_multi_indices(n, 30);
    let (mut lo, mut hi, mut pf) = (f64::INFINITY, 0.0f64, 0.0f64);
    for l in &lg.points {
        let sp = SpectralParameter::new(g, l)?;
        let norm = sp.lambda_norm();
        pf = pf.max((sp.pfaffian / norm.powi(n as i32) - 1.0).abs());
        for a in &all {
            let q = zeta(a, &sp) / ((a.order() + n) as f64 * norm);
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    let gmeta = json!({ "cutoff": 30, "lambda_nodes": lg.len() });
    rec.push(
        "zeta_estimate",
        lo >= 1.0 && hi <= 2.0,
        hi,
        2.0,
        format!("zeta / ((|alpha| + n) |lambda|) in [{lo:.6}, {hi:.6}]"),
        gmeta.clone(),
    );
    rec.at_most("pfaffian_estimate", pf, 1e-12, gmeta);
    Ok(rec.out)
}

fn random_complex(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(r, c, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Unitary factor of a random complex matrix (Gram-Schmidt on the columns).
pub(crate) fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
    let mut m = random_complex(rng, d, d);
    for j in 0..d {
        for i in 0..j {
            let proj: Complex64 = m.column(i).dotc(&m.column(j));
            let ci = m.column(i).clone_owned();
            m.column_mut(j).axpy(-proj, &ci, Complex64::new(1.0, 0.0));
        }
        let nrm = m.column(j).norm();
        m.column_mut(j).unscale_mut(nrm);
    }
    m
}

fn schatten_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckResult>> {
    let mut rec = Recorder { suite: "schatten", seed: cfg.seed, out: vec![] };
    let (mut excess, mut attain, mut mono, mut unit, mut frob, mut tri) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let ps = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0];
    for _ in 0..20 {
        let m = random_complex(rng, 8, 8);
        let s4 = schatten_norm(&m, SchattenP::Finite(4.0))?.powi(4);
        for _ in 0..20 {
            let u = random_unitary(rng, 8);
            excess = excess.max(onb_power_sum(&m, &u, 4.0)? / s4 - 1.0);
        }
        let v = right_singular_vectors(&m)?;
        attain = attain.max((onb_power_sum(&m, &v, 4.0)? / s4 - 1.0).abs());
        let sv = singular_values(&m)?;
        let f2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        frob = frob.max((sv.values.iter().map(|s| s * s).sum::<f64>() / f2 - 1.0).abs());
        let norms: Vec<f64> =
            ps.iter().map(|&p| schatten_norm(&m, SchattenP::Finite(p))).collect::<Result<_>>()?;
        let inf = schatten_norm(&m, SchattenP::Infinity)?;
        for w in norms.windows(2) {
            mono = mono.max((w[1] - w[0]) / w[0]);
        }
        mono = mono.max((inf - norms[norms.len() - 1]) / inf);
        let (u, w) = (random_unitary(rng, 8), random_unitary(rng, 8));
        let other = random_complex(rng, 8, 8);
        for &p in &ps {
            let sp = SchattenP::Finite(p);
            let a = schatten_norm(&m, sp)?;
            unit = unit.max((schatten_norm(&(&u * &m * &w), sp)? / a - 1.0).abs());
            let sum = schatten_norm(&(&m + &other), sp)?;
            tri = tri.max(sum / (a + schatten_norm(&other, sp)?) - 1.0);
        }
    }
    let meta = json!({ "matrices": 20, "dimension": 8, "p": 4 });
    rec.at_most("frame_power_sum_bound", excess, 1e-10, meta.clone());
    rec.at_most("singular_basis_attains", attain, 1e-8, meta.clone());
    rec.at_most("frobenius_reconstruction", frob, 1e-10, meta.clone());
    rec.at_most("monotone_in_p", mono, 1e-10, meta.clone());
    rec.at_most("unitary_invariance", unit, 1e-10, meta.clone());
    rec.at_most("triangle_inequality", tri, 1e-12, meta.clone());
    let u = random_unitary(rng, 6);
    let fb = frame_bounds(&u)?;
    let twice = DMatrix::from_fn(6, 12, |r, c| u[(r, c % 6)]);
    let fb2 = frame_bounds(&twice)?;
    let dev = (fb.lower - 1.0).abs().max((fb.upper - 1.0).abs()).max((fb2.lower - 2.0).abs()).max((fb2.upper - 2.0).abs());
    rec.at_most("frame_bounds", dev, 1e-10, json!({ "dimension": 6 }));
    Ok(rec.out)
}

fn unit_lambda(g: &GroupDescriptor, l: f64) -> Vec<f64> {
    let mut v = vec![0.0; g.k()];
    v[0] = l;
    v
}

fn field_meta(field: &FourierField, cfg: &RunConfig) -> serde_json::Value {
    json!({ "cutoff": field.cutoff, "grid": field.grid, "lambda_nodes": field.len(), "quad": cfg.quad })
}

fn fourier_suite(
    cfg: &RunConfig,
    g: &GroupDescriptor,
    consts: &CalibrationConstants,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CheckResult>> {
    let mut rec = Recorder { suite: "fourier", seed: cfg.seed, out: vec![] };
    let setup = cfg.setup().calibrated(consts);
    let mut worst_plan = 0.0f64;
    let mut worst_hy = 0.0f64;
    let mut meta = json!({});
    for spec in &cfg.family {
        let f = Gaussian::from_spec(g, spec)?;
        let field = FourierField::build_adapted(g, &f, &cfg.grid, cfg.cutoff, &cfg.quad)?;
        meta = field_meta(&field, cfg);
        let est = plancherel_sum(&field, consts)?;
        worst_plan = worst_plan.max((est / f.lp_norm_pow(2.0) - 1.0).abs());
        let ev = HpwEvaluator::with_field(g, &f, setup, field);
        for p in [1.2, 1.5, 1.8] {
            worst_hy = worst_hy.max(ev.hausdorff_young_ratio(p)?);
        }
    }
    rec.at_most("plancherel_held_out", worst_plan, 5e-3, meta.clone());
    rec.at_most("hausdorff_young_ratio", worst_hy, 1.05, meta);

    let base = Gaussian::new(g, 0.5, 0.5)?;
    let mut cov = 0.0f64;
    for (r, l) in [(2.0, 1.0), (0.5, 2.0)] {
        cov = cov.max(dilation_covariance_residual(g, &base, r, &unit_lambda(g, l), cfg.cutoff, &cfg.quad)?);
    }
    rec.at_most("dilation_covariance", cov, 1e-6, json!({ "cutoff": cfg.cutoff, "quad": cfg.quad }));

    let sp = SpectralParameter::new(g, &unit_lambda(g, 0.8))?;
    let probe = base.clone().modulated(&unit_lambda(g, 0.2))?.translated(&GroupPoint::from_parts(
        &(0..2 * g.n()).map(|i| 0.3 - 0.2 * i as f64).collect::<Vec<_>>(),
        &unit_lambda(g, 0.1),
    ))?;
    let m = gft(g, &probe, &sp, 10, &cfg.quad)?;
    let adj = gft(g, &FnFunction::adjoint_of(probe), &sp, 10, &cfg.quad)?;
    let dev = (&adj.entries - m.entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    rec.at_most("adjoint_identity", dev, 1e-8, json!({ "cutoff": 10, "lambda": 0.8 }));

    // inversion: three refinement levels, each with its own fitted constant
    let test = base.clone().dilated(1.2)?;
    let points: Vec<GroupPoint> = (0..20).map(|_| point_in_unit_balls(rng, g.n(), g.k())).collect();
    let calib: Vec<Gaussian> = cfg.calibration_family.iter().map(|s| Gaussian::from_spec(g, s)).collect::<Result<_>>()?;
    let family: Vec<&dyn GroupFunction> = calib.iter().map(|f| f as &dyn GroupFunction).collect();
    let npp = cfg.grid.nodes_per_panel;
    let levels = [(cfg.cutoff, npp), (2 * cfg.cutoff, npp + npp / 2), (3 * cfg.cutoff, 2 * npp)];
    let mut errors = Vec::new();
    let mut imag = 0.0f64;
    for (li, (cut, nodes)) in levels.iter().enumerate() {
        let grid = LambdaGridSpec { nodes_per_panel: *nodes, ..cfg.grid };
        let c = if li == 0 { *consts } else { calibrate(g, &family, &grid, *cut, &cfg.quad, &cfg.haar)?.constants };
        let field = FourierField::build_adapted(g, &test, &grid, *cut, &cfg.quad)?;
        let mut worst = 0.0f64;
        for x in &points {
            let v = invert(&field, x, &c)?;
            let exact = test.eval(x);
            worst = worst.max((v - exact).norm() / exact.norm());
            if li == 0 {
                imag = imag.max(v.im.abs());
            }
        }
        errors.push(worst);
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let last = *errors.last().expect("three levels");
    rec.push(
        "inversion_convergence",
        monotone && last <= 1e-2,
        last,
        1e-2,
        format!("errors {:?} over levels {levels:?}", errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()),
        json!({ "levels": levels, "points": points.len() }),
    );
    rec.at_most("inversion_conjugate_symmetry", imag, 1e-6, json!({ "points": points.len() }));
    Ok(rec.out)
}

fn hpw_suite(cfg: &RunConfig, g: &GroupDescriptor, consts: &CalibrationConstants) -> Result<Vec<CheckResult>> {
    let mut rec = Recorder { suite: "hpw", seed: cfg.seed, out: vec![] };
    let setup = cfg.setup().calibrated(consts);
    let tuples = cfg.admissible_tuples(g);
    let mut min_ratio = f64::INFINITY;
    for spec in &cfg.family {
        let f = Gaussian::from_spec(g, spec)?;
        let ev = HpwEvaluator::new(g, &f, setup)?;
        for t in &tuples {
            min_ratio = min_ratio.min(ev.report(t)?.ratio);
        }
    }
    rec.push(
        "ratio_positive",
        min_ratio > 0.0 && min_ratio.is_finite(),
        min_ratio,
        0.0,
        format!("minimum ratio {min_ratio:.6} over {} tuples and {} members", tuples.len(), cfg.family.len()),
        json!({ "cutoff": cfg.cutoff, "grid": cfg.grid }),
    );

    let base = Gaussian::new(g, 0.5, 0.5)?;
    let ev = HpwEvaluator::new(g, &base, setup)?;
    let mut inv = 0.0f64;
    for [c, r] in &cfg.dilations {
        let d = base.clone().dilated(*r)?.scaled(*c);
        let evd = HpwEvaluator::new(g, &d, setup)?;
        for t in &tuples {
            inv = inv.max((evd.report(t)?.ratio / ev.report(t)?.ratio - 1.0).abs());
        }
    }
    rec.at_most("dilation_invariance", inv, 1e-3, json!({ "pairs": cfg.dilations }));

    let field = ev.field();
    let total = field.raw_plancherel();
    let mut part = 0.0f64;
    for r in [1.0, 5.0, 20.0] {
        let s = spectral_tail_mass(field, r, TailSide::Below)? + spectral_tail_mass(field, r, TailSide::Above)?;
        part = part.max((s / total - 1.0).abs());
    }
    rec.at_most("tail_partition", part, 1e-12, field_meta(field, cfg));

    let cfg15 = InequalityConfig::for_group(g, 1.5, 2.0, 1.0)?;
    let levels = cfg.tail_levels.values();
    let norm = base.lp_norm(1.5);
    let tail_field = FourierField::build_adapted(g, &base, &cfg.tail_grid(), cfg.cutoff, &cfg.quad)?;
    let coarse = tail_bound_check(g, &tail_field, norm, &cfg15, &levels)?;
    let fine_field = FourierField::build_adapted(g, &base, &cfg.tail_grid().refined(), cfg.cutoff, &cfg.quad)?;
    let fine = tail_bound_check(g, &fine_field, norm, &cfg15, &levels)?;
    let drift = (fine.below_constant / coarse.below_constant - 1.0)
        .abs()
        .max((fine.above_constant / coarse.above_constant - 1.0).abs());
    rec.at_most("tail_constants_stable", drift, 0.1, json!({ "levels": cfg.tail_levels, "grid": cfg.tail_grid(), "p": 1.5, "beta": 2.0 }));

    let count_grid = LambdaGridSpec { lambda_min: 1e-3, lambda_max: 60.0, panels: 12, nodes_per_panel: 16, ..cfg.grid };
    let rs: Vec<f64> = (0..15).map(|i| 50f64.powf(i as f64 / 14.0)).collect();
    let (slope, _) = count_scaling_exponent(g, &count_grid, &rs)?;
    let expect = (g.n() + g.k()) as f64;
    rec.at_most("frequency_count_exponent", (slope - expect).abs(), 0.15, json!({ "slope": slope, "expected": expect }));

    let l1 = base.lp_norm(1.0);
    let sup0 = fourier_term_p1(field, 0.0)?.value;
    rec.at_most("operator_norm_below_l1", sup0 / l1 - 1.0, 1e-6, field_meta(field, cfg));

    let sens = p1_refinement_sensitivity(g, &base, 3.0, &setup)?;
    let spread = (sens[2] / sens[1] - 1.0).abs();
    rec.at_most("p1_sup_refinement", spread, 0.02, json!({ "values": sens }));

    let mut filtered = field.clone();
    let keep: Vec<usize> = (0..field.len()).filter(|&i| field.nodes[i].eta.iter().sum::<f64>() >= 1.0).collect();
    filtered.nodes = keep.iter().map(|&i| field.nodes[i].clone()).collect();
    filtered.weights = keep.iter().map(|&i| field.weights[i]).collect();
    filtered.ops = keep.iter().map(|&i| field.ops[i].clone()).collect();
    let mut prev = (0.0, 0.0);
    let mut mono = true;
    for beta in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let cur = (fourier_term_p1(&filtered, beta)?.value, fourier_term_lp(&filtered, beta, 3.0)?);
        mono &= cur.0 >= prev.0 && cur.1 >= prev.1;
        prev = cur;
    }
    rec.push("monotone_in_beta", mono, 0.0, 0.0, format!("{} nodes with zeta >= 1", keep.len()), json!({}));
    Ok(rec.out)
}

/// Runs one suite (or all) and returns the check records.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> std::result::Result<Vec<CheckResult>, CliError> {
    let g = cfg.descriptor().map_err(CliError::usage)?;
    let consts = if suite.needs_sidecar() { Some(load_sidecar(cfg)?.calibration.constants) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::Group) {
        out.extend(group_suite(cfg, &g, &mut rng)?);
    }
    if want(Suite::Hermite) {
        out.extend(hermite_suite(cfg, &g, &mut rng)?);
    }
    if want(Suite::Schatten) {
        out.extend(schatten_suite(cfg, &mut rng)?);
    }
    if want(Suite::Fourier) {
        out.extend(fourier_suite(cfg, &g, consts.as_ref().expect("loaded above"), &mut rng)?);
    }
    if want(Suite::Hpw) {
        out.extend(hpw_suite(cfg, &g, consts.as_ref().expect("loaded above"))?);
    }
    Ok(out)
}

/// [`run_suite`] plus the JSON-lines report in the output directory.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> std::result::Result<Vec<CheckResult>, CliError> {
    let results = run_suite(cfg, suite)?;
    write_atomic(&cfg.out.join(format!("verify_{}.jsonl", suite.name())), &json_lines(&results)?)?;
    Ok(results)
}
