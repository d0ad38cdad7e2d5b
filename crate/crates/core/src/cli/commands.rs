//! `calibrate`, `sweep` and `estimate`.

use std::sync::Arc;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::output::{csv_records, json_lines, json_pretty, write_atomic};
use super::CliError;
use crate::fourier::{calibrate, Calibration, CalibrationConstants, FourierField, FourierQuad, LambdaGridSpec};
use crate::functions::{Gaussian, GroupFunction};
use crate::group::{GroupDescriptor, HaarResolution};
use crate::hpw::{
    estimate_constant, tail_bound_check, EstimateReport, GaussianFamily, HpwEvaluator, HpwSetup, InequalityConfig,
    NelderMeadOptions,
};

/// Settings the calibration depends on, stored with the constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationMeta {
    pub cutoff: usize,
    pub grid: LambdaGridSpec,
    pub quad: FourierQuad,
    pub haar: HaarResolution,
    pub family_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSidecar {
    pub format: String,
    pub config_hash: String,
    pub group_hash: String,
    pub seed: u64,
    pub calibration: Calibration,
    pub meta: CalibrationMeta,
}

pub const SIDECAR_FORMAT: &str = "hpw-calibration/1";

pub fn cmd_calibrate(cfg: &RunConfig) -> Result<CalibrationSidecar, CliError> {
    let g = cfg.descriptor().map_err(CliError::usage)?;
    let members = cfg
        .calibration_family
        .iter()
        .map(|s| Gaussian::from_spec(&g, s))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(CliError::usage)?;
    let family: Vec<&dyn GroupFunction> = members.iter().map(|m| m as &dyn GroupFunction).collect();
    let cal = calibrate(&g, &family, &cfg.grid, cfg.cutoff, &cfg.quad, &cfg.haar).map_err(CliError::check)?;
    info!(
        "C = {:.9}, kappa = {:.9}, residuals {:.3e} / {:.3e}",
        cal.constants.plancherel_c, cal.constants.inversion_kappa, cal.plancherel_residual, cal.inversion_residual
    );
    let sidecar = CalibrationSidecar {
        format: SIDECAR_FORMAT.into(),
        config_hash: cfg.calibration_hash(),
        group_hash: g.hash_hex(),
        seed: cfg.seed,
        calibration: cal,
        meta: CalibrationMeta {
            cutoff: cfg.cutoff,
            grid: cfg.grid,
            quad: cfg.quad,
            haar: cfg.haar,
            family_size: members.len(),
        },
    };
    write_atomic(&cfg.sidecar_path(), &json_pretty(&sidecar)?)?;
    Ok(sidecar)
}

/// Reads and checks the sidecar named by the config.
pub fn load_sidecar(cfg: &RunConfig) -> Result<CalibrationSidecar, CliError> {
    let path = cfg.sidecar_path();
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Env(format!("cannot read calibration sidecar {}: {e}", path.display())))?;
    let sc: CalibrationSidecar = serde_json::from_str(&text)
        .map_err(|e| CliError::Env(format!("corrupted calibration sidecar {}: {e}", path.display())))?;
    if sc.format != SIDECAR_FORMAT {
        return Err(CliError::Env(format!("sidecar format `{}` is not {SIDECAR_FORMAT}", sc.format)));
    }
    if sc.config_hash != cfg.calibration_hash() {
        return Err(CliError::Env(format!(
            "sidecar {} was produced for different settings; rerun `hpw calibrate`",
            path.display()
        )));
    }
    sc.calibration
        .constants
        .validate()
        .map_err(|e| CliError::Env(format!("sidecar {}: {e}", path.display())))?;
    Ok(sc)
}

/// Constants from the sidecar, or `None` with a warning when it is absent.
fn optional_constants(cfg: &RunConfig) -> Result<Option<CalibrationConstants>, CliError> {
    if !cfg.sidecar_path().exists() {
        warn!("no calibration sidecar at {}; frequency integrals use the raw measure", cfg.sidecar_path().display());
        return Ok(None);
    }
    Ok(Some(load_sidecar(cfg)?.calibration.constants))
}

/// One `(p, beta, gamma, member, dilation)` tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    pub family_index: usize,
    /// 0 for the member itself, `j` for the `j`-th `(c, r)` pair.
    pub dilation_index: usize,
    pub c: f64,
    pub r: f64,
    pub ratio: f64,
    pub lhs: f64,
    pub weight_term: f64,
    pub fourier_term: f64,
    pub norm_p: f64,
    pub weighted_norm: f64,
    pub fourier_factor: f64,
    /// `|ratio / ratio(member) - 1|`.
    pub dilation_residual: f64,
    pub tail_below_constant: f64,
    pub tail_above_constant: f64,
    pub cutoff: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub lambda_nodes: usize,
    pub pq_nodes: usize,
    pub t_nodes: usize,
    pub haar_v_nodes: usize,
    pub haar_t_nodes: usize,
    pub measure_scale: f64,
    pub seed: u64,
}

/// Ratio statistics along one swept axis (undilated rows only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub axis: String,
    pub value: f64,
    pub rows: usize,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub cutoff: usize,
    pub lambda_nodes: usize,
    pub measure_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedTuple {
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config_hash: String,
    pub seed: u64,
    pub rows: usize,
    pub min_ratio: f64,
    pub argmin: SweepRow,
    pub max_dilation_residual: f64,
    pub skipped: Vec<SkippedTuple>,
    pub measure_scale: f64,
}

pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub plot: Vec<PlotRow>,
    pub summary: SweepSummary,
}

fn sort_key(r: &SweepRow) -> (f64, f64, f64, usize, usize) {
    (r.p, r.beta, r.gamma, r.family_index, r.dilation_index)
}

pub fn run_sweep(cfg: &RunConfig) -> Result<SweepOutput, CliError> {
    let g = cfg.descriptor().map_err(CliError::usage)?;
    let (tuples, skipped) = cfg.partition_tuples(&g);
    if !skipped.is_empty() {
        warn!("skipping {} inadmissible (p, beta, gamma) tuples; reasons are listed in the summary", skipped.len());
    }
    let consts = optional_constants(cfg)?;
    let setup = match &consts {
        Some(c) => cfg.setup().calibrated(c),
        None => cfg.setup(),
    };
    let levels = cfg.tail_levels.values();
    let mut rows = Vec::new();
    for (fi, spec) in cfg.family.iter().enumerate() {
        let member = Gaussian::from_spec(&g, spec).map_err(CliError::usage)?;
        let mut variants: Vec<(usize, f64, f64, Arc<Gaussian>)> = vec![(0, 1.0, 1.0, Arc::new(member.clone()))];
        for (j, [c, r]) in cfg.dilations.iter().enumerate() {
            let v = member.clone().dilated(*r).map_err(CliError::usage)?.scaled(*c);
            variants.push((j + 1, *c, *r, Arc::new(v)));
        }
        let mut base_ratios: Vec<f64> = Vec::new();
        for (di, c, r, f) in &variants {
            info!("family member {fi}, dilation {di}");
            let ev = HpwEvaluator::new(&g, f.as_ref(), setup)?;
            // tail levels follow the adapted grid so the constants are dilation invariant
            let s2 = f.natural_scale().powi(2);
            let levels: Vec<f64> = levels.iter().map(|r| r / s2).collect();
            let tail_field = if cfg.tail_refinement == 1 {
                None
            } else {
                Some(FourierField::build_adapted(&g, f.as_ref(), &cfg.tail_grid(), cfg.cutoff, &cfg.quad)?)
            };
            let tail_field = tail_field.as_ref().unwrap_or(ev.field());
            let mut tails: Vec<((u64, u64), (f64, f64))> = Vec::new();
            for (ti, t) in tuples.iter().enumerate() {
                let rep = ev.report(t)?;
                let key = (t.p.to_bits(), t.beta.to_bits());
                let tail = match tails.iter().find(|(k, _)| *k == key) {
                    Some((_, v)) => *v,
                    None => {
                        let tt = tail_bound_check(&g, tail_field, rep.norm_p, t, &levels)?;
                        let v = (tt.below_constant, tt.above_constant);
                        tails.push((key, v));
                        v
                    }
                };
                if *di == 0 {
                    base_ratios.push(rep.ratio);
                }
                let residual = (rep.ratio / base_ratios[ti] - 1.0).abs();
                rows.push(row(cfg, &setup, t, fi, *di, *c, *r, &rep, residual, tail, ev.field().len()));
            }
        }
    }
    rows.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).expect("finite keys"));
    let plot = plot_rows(&rows);
    let argmin = rows
        .iter()
        .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .cloned()
        .ok_or_else(|| CliError::Check("sweep produced no rows".into()))?;
    let summary = SweepSummary {
        config_hash: cfg.hash_hex(),
        seed: cfg.seed,
        rows: rows.len(),
        min_ratio: argmin.ratio,
        argmin,
        max_dilation_residual: rows.iter().map(|r| r.dilation_residual).fold(0.0, f64::max),
        skipped: skipped.into_iter().map(|(p, beta, gamma, reason)| SkippedTuple { p, beta, gamma, reason }).collect(),
        measure_scale: setup.measure_scale,
    };
    Ok(SweepOutput { rows, plot, summary })
}

#[allow(clippy::too_many_arguments)]
fn row(
    cfg: &RunConfig,
    setup: &HpwSetup,
    t: &InequalityConfig,
    fi: usize,
    di: usize,
    c: f64,
    r: f64,
    rep: &crate::hpw::HpwReport,
    residual: f64,
    tail: (f64, f64),
    nodes: usize,
) -> SweepRow {
    SweepRow {
        p: t.p,
        beta: t.beta,
        gamma: t.gamma,
        family_index: fi,
        dilation_index: di,
        c,
        r,
        ratio: rep.ratio,
        lhs: rep.lhs,
        weight_term: rep.weight_term,
        fourier_term: rep.fourier_term,
        norm_p: rep.norm_p,
        weighted_norm: rep.weighted_norm,
        fourier_factor: rep.fourier_factor,
        dilation_residual: residual,
        tail_below_constant: tail.0,
        tail_above_constant: tail.1,
        cutoff: setup.cutoff,
        lambda_min: setup.grid.lambda_min,
        lambda_max: setup.grid.lambda_max,
        panels: setup.grid.panels,
        nodes_per_panel: setup.grid.nodes_per_panel,
        lambda_nodes: nodes,
        pq_nodes: setup.quad.pq_nodes,
        t_nodes: setup.quad.t_nodes,
        haar_v_nodes: setup.haar.v_nodes,
        haar_t_nodes: setup.haar.t_nodes,
        measure_scale: setup.measure_scale,
        seed: cfg.seed,
    }
}

type Axis = (&'static str, fn(&SweepRow) -> f64);

fn plot_rows(rows: &[SweepRow]) -> Vec<PlotRow> {
    let base: Vec<&SweepRow> = rows.iter().filter(|r| r.dilation_index == 0).collect();
    let mut out = Vec::new();
    let axes: [Axis; 3] = [("p", |r| r.p), ("beta", |r| r.beta), ("gamma", |r| r.gamma)];
    for (name, get) in axes {
        let mut values: Vec<f64> = base.iter().map(|r| get(r)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for v in values {
            let sel: Vec<f64> = base.iter().filter(|r| get(r) == v).map(|r| r.ratio).collect();
            let first = base.iter().find(|r| get(r) == v).expect("value taken from rows");
            out.push(PlotRow {
                axis: name.into(),
                value: v,
                rows: sel.len(),
                min_ratio: sel.iter().copied().fold(f64::INFINITY, f64::min),
                mean_ratio: sel.iter().sum::<f64>() / sel.len() as f64,
                max_ratio: sel.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                cutoff: first.cutoff,
                lambda_nodes: first.lambda_nodes,
                measure_scale: first.measure_scale,
            });
        }
    }
    out
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepOutput, CliError> {
    let out = run_sweep(cfg)?;
    write_atomic(&cfg.out.join("sweep.csv"), &csv_records(&out.rows)?)?;
    write_atomic(&cfg.out.join("sweep.jsonl"), &json_lines(&out.rows)?)?;
    write_atomic(&cfg.out.join("plot.csv"), &csv_records(&out.plot)?)?;
    write_atomic(&cfg.out.join("sweep_summary.json"), &json_pretty(&out.summary)?)?;
    if out.rows.iter().any(|r| !(r.ratio > 0.0)) {
        return Err(CliError::Check("a sweep ratio is not strictly positive".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub config_hash: String,
    pub report: EstimateReport,
    /// Family members of the config evaluated before the simplex search.
    pub scanned_members: Vec<usize>,
    pub cutoff: usize,
    pub grid: LambdaGridSpec,
    pub quad: FourierQuad,
    pub haar: HaarResolution,
    pub measure_scale: f64,
}

pub fn run_estimate(cfg: &RunConfig) -> Result<EstimateOutput, CliError> {
    let g: GroupDescriptor = cfg.descriptor().map_err(CliError::usage)?;
    let e = &cfg.estimate;
    let ineq = InequalityConfig::for_group(&g, e.p, e.beta, e.gamma).map_err(CliError::usage)?;
    let consts = optional_constants(cfg)?;
    let setup = match &consts {
        Some(c) => cfg.setup().calibrated(c),
        None => cfg.setup(),
    };
    let mut scan = Vec::new();
    let mut scanned_members = Vec::new();
    for (i, s) in cfg.family.iter().enumerate() {
        match GaussianFamily::theta_of(&g, s) {
            Some(th) => {
                scan.push(th);
                scanned_members.push(i);
            }
            None => warn!("family member {i} is outside the estimate coordinates; not scanned"),
        }
    }
    let opts = NelderMeadOptions { budget: e.budget, initial_step: e.initial_step, seed: cfg.seed, scan };
    let report = estimate_constant(&g, &e.family, &ineq, &setup, &opts)?;
    Ok(EstimateOutput {
        config_hash: cfg.hash_hex(),
        report,
        scanned_members,
        cutoff: setup.cutoff,
        grid: setup.grid,
        quad: setup.quad,
        haar: setup.haar,
        measure_scale: setup.measure_scale,
    })
}

pub fn cmd_estimate(cfg: &RunConfig) -> Result<EstimateOutput, CliError> {
    let out = run_estimate(cfg)?;
    write_atomic(&cfg.out.join("estimate.json"), &json_pretty(&out)?)?;
    if let Some(why) = &out.report.aborted {
        return Err(CliError::Check(format!("optimizer aborted: {why}")));
    }
    Ok(out)
}
