//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Built with `harness = false` so the lines show up in `cargo test` output.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use hpw_core::cli::{cmd_calibrate, run_sweep, RunConfig};
use hpw_core::fourier::{calibrate, gft, invert, plancherel_sum, FourierField, FourierQuad, LambdaGridSpec};
use hpw_core::functions::{Gaussian, GaussianSpec, GroupFunction};
use hpw_core::group::{dilate, haar_integral, hom_norm, inverse, GroupDescriptor, GroupPoint, HaarResolution};
use hpw_core::hermite::{enumerate_multi_indices, phi_alpha_eval, zeta, SpectralParameter};
use hpw_core::hpw::{count_scaling_exponent, spectral_tail_mass, tail_bound_check, HpwEvaluator, InequalityConfig, TailSide};
use hpw_core::quadrature::gauss_hermite;
use hpw_core::schatten::{onb_power_sum, right_singular_vectors, schatten_norm, SchattenP};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Outcome = (bool, String);

fn h1() -> GroupDescriptor {
    GroupDescriptor::heisenberg(1).unwrap()
}

fn defaults() -> RunConfig {
    RunConfig::default()
}

/// `||f||_2^2` for a Gaussian family member on `H^1`: translation and
/// unimodular modulation leave it at `A^2 (pi / 2a) (pi / 2b)^{1/2}`.
fn l2_sq(spec: &GaussianSpec) -> f64 {
    spec.amplitude * spec.amplitude * (PI / (2.0 * spec.a)) * (PI / (2.0 * spec.b)).sqrt()
}

fn max_diff(a: &GroupPoint, b: &GroupPoint) -> f64 {
    a.p.iter().chain(&a.q).chain(&a.t).zip(b.p.iter().chain(&b.q).chain(&b.t)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = h1();
    let idx = enumerate_multi_indices(1, 8);
    let gh = gauss_hermite(40);
    let mut worst = 0.0f64;
    for lam in [-2.5, 0.3, 1.0] {
        let sp = SpectralParameter::new(&g, &[lam]).unwrap();
        let s = sp.eta[0].sqrt();
        let mut gram = DMatrix::<f64>::zeros(idx.len(), idx.len());
        for (x, w) in gh.nodes.iter().zip(&gh.scaled_weights) {
            let vals: Vec<f64> = idx.iter().map(|a| phi_alpha_eval(a, &sp, &[x / s]).unwrap()).collect();
            for i in 0..idx.len() {
                for j in 0..idx.len() {
                    gram[(i, j)] += w / s * vals[i] * vals[j];
                }
            }
        }
        worst = worst.max((gram - DMatrix::identity(idx.len(), idx.len())).abs().max());
    }
    let secs = start.elapsed().as_secs_f64();
    (worst <= 1e-10 && secs < 5.0, format!("max |G - I| = {worst:.2e} (tol 1e-10), {secs:.2} s (limit 5 s)"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let g = h1();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pt = |rng: &mut ChaCha8Rng| {
        let mut c = || rng.random_range(-2.0..2.0);
        GroupPoint::new(vec![c()], vec![c()], vec![c()]).unwrap()
    };
    let (mut assoc, mut inv, mut hom, mut norm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let (a, b, c) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let r = rng.random_range(0.1..4.0);
        let l = g.multiply(&g.multiply(&a, &b).unwrap(), &c).unwrap();
        let rr = g.multiply(&a, &g.multiply(&b, &c).unwrap()).unwrap();
        assoc = assoc.max(max_diff(&l, &rr));
        inv = inv.max(max_diff(&g.multiply(&a, &inverse(&a)).unwrap(), &g.identity()));
        let d1 = dilate(&g.multiply(&a, &b).unwrap(), r).unwrap();
        let d2 = g.multiply(&dilate(&a, r).unwrap(), &dilate(&b, r).unwrap()).unwrap();
        hom = hom.max(max_diff(&d1, &d2));
        let na = hom_norm(&a);
        norm = norm.max((hom_norm(&dilate(&a, r).unwrap()) / (r * na) - 1.0).abs());
    }
    let machine = assoc <= 1e-13 && inv == 0.0 && hom <= 1e-13 && norm <= 1e-15;

    let f = Gaussian::new(&g, 0.5, 0.5).unwrap();
    let haar = HaarResolution::default();
    let exact = (2.0 * PI).powf(1.5);
    let base = haar_integral(&g, |x| f.eval(x), &f.decay_box(), &haar).unwrap().value.re;
    let mut homdim = 0.0f64;
    for r in [0.5, 2.0] {
        let bx = f.decay_box().scaled(1.0 / r);
        let got = haar_integral(&g, |x| f.eval(&dilate(x, r).unwrap()), &bx, &haar).unwrap().value.re;
        homdim = homdim.max((got / (r.powi(-4) * exact) - 1.0).abs());
    }
    let gauss = (base / exact - 1.0).abs();
    let secs = start.elapsed().as_secs_f64();
    (
        machine && homdim <= 1e-6 && gauss <= 1e-8 && secs < 30.0,
        format!(
            "assoc {assoc:.1e}, inverse {inv:.1e}, dilation {hom:.1e}, norm {norm:.1e} over 1e4 samples; \
             dilation identity {homdim:.1e} (tol 1e-6); Gaussian integral {gauss:.1e}; {secs:.1} s"
        ),
    )
}

fn calibrated(g: &GroupDescriptor, cfg: &RunConfig, grid: &LambdaGridSpec, cutoff: usize) -> hpw_core::fourier::Calibration {
    let fam: Vec<Gaussian> = cfg.calibration_family.iter().map(|s| Gaussian::from_spec(g, s).unwrap()).collect();
    let refs: Vec<&dyn GroupFunction> = fam.iter().map(|f| f as &dyn GroupFunction).collect();
    calibrate(g, &refs, grid, cutoff, &cfg.quad, &cfg.haar).unwrap()
}

fn criteria_3_and_6() -> (Outcome, Outcome) {
    let start = Instant::now();
    let g = h1();
    let cfg = defaults();
    let cal = calibrated(&g, &cfg, &cfg.grid, cfg.cutoff);
    let setup = cfg.setup().calibrated(&cal.constants);
    let (mut plan, mut hy) = (0.0f64, 0.0f64);
    let mut nodes = 0;
    for spec in &cfg.family {
        let f = Gaussian::from_spec(&g, spec).unwrap();
        let field = FourierField::build_adapted(&g, &f, &cfg.grid, cfg.cutoff, &cfg.quad).unwrap();
        nodes = field.len();
        plan = plan.max((plancherel_sum(&field, &cal.constants).unwrap() / l2_sq(spec) - 1.0).abs());
        let ev = HpwEvaluator::with_field(&g, &f, setup, field);
        for p in [1.2, 1.5, 1.8] {
            hy = hy.max(ev.hausdorff_young_ratio(p).unwrap());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        (
            plan <= 5e-3 && nodes == 64 && cfg.cutoff == 20 && cfg.family.len() == 10,
            format!(
                "max relative error {plan:.2e} (tol 5e-3) over {} held-out functions, N = {}, {nodes} nodes, {secs:.1} s",
                cfg.family.len(),
                cfg.cutoff
            ),
        ),
        (hy <= 1.05, format!("max ratio {hy:.4} (tol 1.05) for p in {{1.2, 1.5, 1.8}}")),
    )
}

fn criterion_4() -> Outcome {
    // F(f o delta_{1/r})(lambda) = r^Q F(f)(r^2 lambda), entry by entry
    let g = h1();
    let f = Gaussian::new(&g, 0.5, 0.5).unwrap();
    let quad = FourierQuad::default();
    let mut worst = 0.0f64;
    for r in [0.5, 2.0] {
        let fr = f.clone().dilated(r).unwrap();
        for lam in [-1.5, 0.4, 2.0] {
            let a = gft(&g, &fr, &SpectralParameter::new(&g, &[lam]).unwrap(), 10, &quad).unwrap();
            let b = gft(&g, &f, &SpectralParameter::new(&g, &[r * r * lam]).unwrap(), 10, &quad).unwrap();
            let scale = r.powi(4);
            let top = b.entries.iter().map(|z| z.norm() * scale).fold(0.0, f64::max);
            let res = (&a.entries - &b.entries * Complex64::new(scale, 0.0)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(res / top);
        }
    }
    (worst <= 1e-6, format!("max entrywise residual {worst:.2e} relative to the largest entry (tol 1e-6)"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let g = h1();
    let cfg = defaults();
    let r = 1.2;
    let f = Gaussian::new(&g, 0.5, 0.5).unwrap().dilated(r).unwrap();
    let (a, b) = (0.5 / (r * r), 0.5 / r.powi(4));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut points = Vec::new();
    while points.len() < 20 {
        let (p, q, t) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if p * p + q * q <= 1.0 {
            points.push(GroupPoint::new(vec![p], vec![q], vec![t]).unwrap());
        }
    }
    let levels = [(20, 8), (40, 12), (60, 16)];
    let mut errors = Vec::new();
    for (cutoff, npp) in levels {
        let grid = LambdaGridSpec { nodes_per_panel: npp, ..cfg.grid };
        let cal = calibrated(&g, &cfg, &grid, cutoff);
        let field = FourierField::build_adapted(&g, &f, &grid, cutoff, &cfg.quad).unwrap();
        let worst = points
            .iter()
            .map(|x| {
                let exact = (-a * x.v_norm_sq() - b * x.t_norm_sq()).exp();
                (invert(&field, x, &cal.constants).unwrap() - exact).norm() / exact
            })
            .fold(0.0, f64::max);
        errors.push(worst);
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let last = errors[2];
    (
        monotone && last <= 1e-2,
        format!(
            "max relative error per level (N, nodes/panel) {levels:?}: {:.2e}, {:.2e}, {:.2e} (tol 1e-2, decreasing), {:.1} s",
            errors[0],
            errors[1],
            errors[2],
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rand_m = |rng: &mut ChaCha8Rng| {
        DMatrix::from_fn(8, 8, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    };
    let (mut excess, mut attain, mut mono, mut unit) = (f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY, 0.0f64);
    for _ in 0..20 {
        let t = rand_m(&mut rng);
        let s4 = schatten_norm(&t, SchattenP::Finite(4.0)).unwrap().powi(4);
        for _ in 0..20 {
            let u = rand_m(&mut rng).qr().q();
            excess = excess.max(onb_power_sum(&t, &u, 4.0).unwrap() / s4 - 1.0);
        }
        let v = right_singular_vectors(&t).unwrap();
        attain = attain.max((onb_power_sum(&t, &v, 4.0).unwrap() / s4 - 1.0).abs());
        let ps = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0];
        let norms: Vec<f64> = ps.iter().map(|&p| schatten_norm(&t, SchattenP::Finite(p)).unwrap()).collect();
        for w in norms.windows(2) {
            mono = mono.max(w[1] / w[0] - 1.0);
        }
        let (u, w) = (rand_m(&mut rng).qr().q(), rand_m(&mut rng).qr().q());
        for (&p, &n) in ps.iter().zip(&norms) {
            unit = unit.max((schatten_norm(&(&u * &t * &w), SchattenP::Finite(p)).unwrap() / n - 1.0).abs());
        }
    }
    (
        excess <= 1e-10 && attain <= 1e-8 && mono <= 1e-10 && unit <= 1e-10,
        format!(
            "max ONB sum / ||T||_4^4 - 1 = {excess:.1e} (tol 1e-10); singular basis {attain:.1e} (tol 1e-8); \
             max ||T||_q / ||T||_p - 1 for q > p = {mono:.1e}; unitary invariance {unit:.1e} (tol 1e-10)"
        ),
    )
}

fn baseline_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/baselines/sweep_min_ratio.json")
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { out: dir.path().to_path_buf(), ..defaults() };
    cmd_calibrate(&cfg).unwrap();
    let sweep = run_sweep(&cfg).unwrap();
    let positive = sweep.rows.iter().all(|r| r.ratio > 0.0 && r.ratio.is_finite());
    let residual = sweep.summary.max_dilation_residual;
    let min = sweep.summary.min_ratio;
    let path = baseline_path();
    let baseline = match std::fs::read(&path) {
        Ok(bytes) => {
            let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            let old = v["min_ratio"].as_f64().unwrap();
            let drift = (min / old - 1.0).abs();
            let same_config = v["config_hash"] == json!(cfg.hash_hex());
            (
                drift <= 1e-6 && same_config,
                format!("baseline {old:.9}, drift {drift:.1e} (tol 1e-6), same config = {same_config}"),
            )
        }
        Err(_) => {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            let doc = json!({ "min_ratio": min, "config_hash": cfg.hash_hex(), "rows": sweep.rows.len() });
            std::fs::write(&path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
            (true, "baseline recorded".to_string())
        }
    };
    (
        positive && residual <= 1e-3 && baseline.0,
        format!(
            "{} rows all positive = {positive}; min ratio {min:.9}; max dilation residual {residual:.1e} (tol 1e-3); {}; {:.1} s",
            sweep.rows.len(),
            baseline.1,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_9() -> Outcome {
    let g = h1();
    let cfg = defaults();
    let f = Gaussian::new(&g, 0.5, 0.5).unwrap();
    let coarse = FourierField::build_adapted(&g, &f, &cfg.tail_grid(), cfg.cutoff, &cfg.quad).unwrap();
    let fine = FourierField::build_adapted(&g, &f, &cfg.tail_grid().refined(), cfg.cutoff, &cfg.quad).unwrap();
    let levels = cfg.tail_levels.values();
    let total = coarse.raw_plancherel();
    let mut partition = 0.0f64;
    for &r in &levels {
        let s = spectral_tail_mass(&coarse, r, TailSide::Below).unwrap() + spectral_tail_mass(&coarse, r, TailSide::Above).unwrap();
        partition = partition.max((s / total - 1.0).abs());
    }
    let mut drift = 0.0f64;
    let mut finite = true;
    for &p in &cfg.inequality.p {
        for &beta in &cfg.inequality.beta {
            let Ok(ic) = InequalityConfig::for_group(&g, p, beta, 1.0) else { continue };
            let norm = f.lp_norm(p);
            let a = tail_bound_check(&g, &coarse, norm, &ic, &levels).unwrap();
            let b = tail_bound_check(&g, &fine, norm, &ic, &levels).unwrap();
            for (x, y) in [(a.below_constant, b.below_constant), (a.above_constant, b.above_constant)] {
                finite &= x.is_finite() && y.is_finite() && x > 0.0;
                drift = drift.max((y / x - 1.0).abs());
            }
        }
    }
    let count_grid = LambdaGridSpec { lambda_min: 1e-3, lambda_max: 60.0, panels: 12, nodes_per_panel: 16, ..cfg.grid };
    let rs: Vec<f64> = (0..15).map(|i| 50f64.powf(i as f64 / 14.0)).collect();
    let mut slopes = Vec::new();
    let mut slope_ok = true;
    for g in [h1(), GroupDescriptor::heisenberg(2).unwrap(), GroupDescriptor::quaternionic()] {
        let grid = if g.k() > 1 { LambdaGridSpec { directions: 4, nodes_per_panel: 8, ..count_grid } } else { count_grid };
        let (s, _) = count_scaling_exponent(&g, &grid, &rs).unwrap();
        slope_ok &= (s - (g.n() + g.k()) as f64).abs() <= 0.15;
        slopes.push(format!("{s:.3} (expect {})", g.n() + g.k()));
    }
    (
        partition <= 1e-13 && finite && drift <= 0.1 && slope_ok,
        format!(
            "partition {partition:.1e} over {} levels; tail grid {} nodes/panel, constants finite = {finite}, max change under doubling {drift:.3} (tol 0.1); \
             count exponents {}",
            levels.len(),
            cfg.tail_grid().nodes_per_panel,
            slopes.join(", ")
        ),
    )
}

fn criterion_10() -> Outcome {
    let cfg = defaults();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut pf = 0.0f64;
    for g in [h1(), GroupDescriptor::heisenberg(2).unwrap()] {
        let n = g.n();
        let all = enumerate_multi_indices(n, 30);
        for l in &cfg.grid.build(1).unwrap().points {
            let sp = SpectralParameter::new(&g, l).unwrap();
            let norm = sp.lambda_norm();
            pf = pf.max((sp.pfaffian / norm.powi(n as i32) - 1.0).abs());
            for a in &all {
                let q = zeta(a, &sp) / ((a.order() + n) as f64 * norm);
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
    }
    (
        lo >= 1.0 && hi <= 2.0 && pf <= 4.0 * f64::EPSILON,
        format!("zeta / ((|alpha| + n) |lambda|) in [{lo}, {hi}]; max |Pf / |lambda|^n - 1| = {pf:.1e}"),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "Hermite Gram matrix", criterion_1()));
    results.push((2, "group axioms and Haar scaling", criterion_2()));
    let (c3, c6) = criteria_3_and_6();
    results.push((3, "Plancherel on held-out family", c3));
    results.push((4, "dilation covariance", criterion_4()));
    results.push((5, "inversion convergence", criterion_5()));
    results.push((6, "Hausdorff-Young ratio", c6));
    results.push((7, "Schatten norms and frames", criterion_7()));
    results.push((8, "HPW ratio positivity and invariance", criterion_8()));
    results.push((9, "spectral tails and frequency count", criterion_9()));
    results.push((10, "eigenvalue and Pfaffian estimates", criterion_10()));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (i, name, (ok, detail)) in &results {
        println!("criterion {i:>2} {}: {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
