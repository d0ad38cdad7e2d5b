//! Run configuration: one JSON document plus `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fourier::{FourierQuad, LambdaGridSpec};
use crate::functions::GaussianSpec;
use crate::group::{hex_digest, DescriptorSpec, GroupDescriptor, HaarResolution};
use crate::hpw::{GaussianFamily, HpwSetup, InequalityConfig};

/// Exponent lists crossed by `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityGrid {
    pub p: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for InequalityGrid {
    fn default() -> Self {
        Self { p: vec![1.0, 1.25, 1.5, 1.75], beta: vec![0.5, 1.0, 2.0, 3.0, 4.0], gamma: vec![0.5, 1.0, 2.0] }
    }
}

/// Levels of `zeta` for the tail tables: `count` points log-spaced on
/// `[min, max]`, in units of the function's natural frequency scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailLevels {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for TailLevels {
    fn default() -> Self {
        Self { min: 0.2, max: 20.0, count: 81 }
    }
}

impl TailLevels {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let ratio = self.max / self.min;
        (0..self.count).map(|i| self.min * ratio.powf(i as f64 / (self.count - 1) as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSettings {
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    pub family: GaussianFamily,
    pub budget: usize,
    pub initial_step: f64,
}

impl Default for EstimateSettings {
    fn default() -> Self {
        Self {
            p: 1.5,
            beta: 1.0,
            gamma: 1.0,
            family: GaussianFamily {
                lower: [(0.1f64).ln(), (0.1f64).ln(), -0.3, -1.0],
                upper: [(2.0f64).ln(), (2.0f64).ln(), 0.3, 1.0],
                start: [(0.5f64).ln(), (0.5f64).ln(), 0.0, 0.0],
            },
            budget: 40,
            initial_step: 0.25,
        }
    }
}

fn dilate_spec(a: f64, b: f64, r: f64) -> GaussianSpec {
    GaussianSpec::standard(a / (r * r), b / r.powi(4))
}

/// Dilates of `exp(-|v|^2/2 - t^2/2)` used to fit the constants.
pub fn default_calibration_family() -> Vec<GaussianSpec> {
    [0.7, 1.0, 1.5].iter().map(|&r| dilate_spec(0.5, 0.5, r)).collect()
}

/// Ten held-out members: dilates, translates, central modulations and mixes.
pub fn default_test_family() -> Vec<GaussianSpec> {
    let base = GaussianSpec::standard(0.5, 0.5);
    let with = |f: &dyn Fn(&mut GaussianSpec)| {
        let mut s = base.clone();
        f(&mut s);
        s
    };
    vec![
        dilate_spec(0.5, 0.5, 0.5),
        dilate_spec(0.5, 0.5, 2.0),
        with(&|s| s.shift_v = vec![0.5, 0.0]),
        with(&|s| s.shift_v = vec![-0.8, 0.0]),
        with(&|s| s.modulation = vec![0.2]),
        with(&|s| s.modulation = vec![-0.3]),
        GaussianSpec { modulation: vec![0.15], ..dilate_spec(0.5, 0.5, 1.3) },
        with(&|s| {
            s.shift_v = vec![0.4, 0.0];
            s.modulation = vec![-0.2];
        }),
        GaussianSpec { shift_v: vec![0.6, 0.0], ..dilate_spec(0.5, 0.5, 0.8) },
        GaussianSpec { amplitude: 3.0, ..dilate_spec(0.5, 0.5, 1.2) },
    ]
}

fn default_dilations() -> Vec<[f64; 2]> {
    vec![[5.0, 2.0], [0.1, 0.5]]
}

/// `(p, beta, gamma, reason)` for a tuple outside the admissible range.
pub type Rejected = (f64, f64, f64, String);

/// Everything a command needs; see `RunConfig::default` for the shipped values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: DescriptorSpec,
    pub cutoff: usize,
    pub grid: LambdaGridSpec,
    #[serde(default)]
    pub quad: FourierQuad,
    #[serde(default)]
    pub haar: HaarResolution,
    #[serde(default)]
    pub inequality: InequalityGrid,
    #[serde(default = "default_calibration_family")]
    pub calibration_family: Vec<GaussianSpec>,
    #[serde(default = "default_test_family")]
    pub family: Vec<GaussianSpec>,
    /// `(c, r)` pairs: the sweep also evaluates `c f o delta_{1/r}`.
    #[serde(default = "default_dilations")]
    pub dilations: Vec<[f64; 2]>,
    #[serde(default)]
    pub tail_levels: TailLevels,
    /// Tail tables use `grid` with this many times the nodes per panel; the
    /// above-level mass at large `beta` needs more resolution than Plancherel.
    #[serde(default = "default_tail_refinement")]
    pub tail_refinement: usize,
    #[serde(default)]
    pub estimate: EstimateSettings,
    /// Calibration sidecar; relative paths resolve against the output directory.
    #[serde(default = "default_sidecar")]
    pub sidecar: PathBuf,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_tail_refinement() -> usize {
    2
}

fn default_sidecar() -> PathBuf {
    PathBuf::from("calibration.json")
}

fn default_out() -> PathBuf {
    PathBuf::from("hpw-out")
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            group: DescriptorSpec::Heisenberg { n: 1 },
            cutoff: 20,
            grid: LambdaGridSpec::default(),
            quad: FourierQuad::default(),
            haar: HaarResolution::default(),
            inequality: InequalityGrid::default(),
            calibration_family: default_calibration_family(),
            family: default_test_family(),
            dilations: default_dilations(),
            tail_levels: TailLevels::default(),
            tail_refinement: default_tail_refinement(),
            estimate: EstimateSettings::default(),
            sidecar: default_sidecar(),
            out: default_out(),
            seed: 0,
        }
    }
}

/// Sets `path` (dot-separated keys, numeric segments index arrays) to
/// `raw`, parsed as JSON when possible and as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("override `{assignment}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("`{key}` in `{path}` is not an array index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| Error::InvalidParameter(format!("index {idx} out of range ({len}) in `{path}`")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::InvalidParameter(format!("`{path}` descends into a scalar"))),
        };
    }
    Err(Error::InvalidParameter("empty override key".into()))
}

impl RunConfig {
    /// Reads the file (if any), applies overrides in order, then validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => serde_json::from_str::<Value>(&std::fs::read_to_string(p)?)?,
            None => serde_json::to_value(Self::default())?,
        };
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = serde_json::from_value(doc)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn descriptor(&self) -> Result<GroupDescriptor> {
        GroupDescriptor::from_spec(&self.group)
    }

    pub fn setup(&self) -> HpwSetup {
        HpwSetup { cutoff: self.cutoff, grid: self.grid, quad: self.quad, haar: self.haar, measure_scale: 1.0 }
    }

    pub fn sidecar_path(&self) -> PathBuf {
        if self.sidecar.is_absolute() {
            self.sidecar.clone()
        } else {
            self.out.join(&self.sidecar)
        }
    }

    /// Cheap checks run before any heavy computation.
    pub fn validate(&self) -> Result<()> {
        let g = self.descriptor()?;
        self.grid.validate()?;
        if self.quad.pq_nodes == 0 || self.quad.t_nodes == 0 || self.quad.xi_nodes == Some(0) {
            return Err(Error::InvalidParameter("quadrature node counts must be positive".into()));
        }
        if self.haar.v_nodes == 0 || self.haar.t_nodes == 0 {
            return Err(Error::InvalidParameter("Haar node counts must be positive".into()));
        }
        let ig = &self.inequality;
        if ig.p.is_empty() || ig.beta.is_empty() || ig.gamma.is_empty() {
            return Err(Error::InvalidParameter("inequality grid lists must be non-empty".into()));
        }
        if let Some(p) = ig.p.iter().find(|p| !(1.0..2.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!("p = {p} is outside [1, 2)")));
        }
        if let Some(c) = ig.gamma.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma = {c} is not positive")));
        }
        if self.admissible_tuples(&g).is_empty() {
            return Err(Error::InvalidParameter("no admissible (p, beta, gamma) tuple in the grid".into()));
        }
        for [c, r] in &self.dilations {
            if !(*c != 0.0 && c.is_finite() && *r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("bad dilation pair ({c}, {r})")));
            }
        }
        if !(self.tail_levels.min > 0.0 && self.tail_levels.max >= self.tail_levels.min && self.tail_levels.count > 0) {
            return Err(Error::InvalidParameter("tail levels need 0 < min <= max and count >= 1".into()));
        }
        if self.tail_refinement == 0 {
            return Err(Error::InvalidParameter("tail_refinement must be at least 1".into()));
        }
        if self.family.is_empty() {
            return Err(Error::InvalidParameter("test family is empty".into()));
        }
        self.estimate.family.validate()?;
        InequalityConfig::for_group(&g, self.estimate.p, self.estimate.beta, self.estimate.gamma)?;
        Ok(())
    }

    /// Frequency grid for the tail tables.
    pub fn tail_grid(&self) -> LambdaGridSpec {
        LambdaGridSpec { nodes_per_panel: self.grid.nodes_per_panel * self.tail_refinement, ..self.grid }
    }

    /// Admissible tuples in `(p, beta, gamma)` order; inadmissible ones are
    /// returned separately with the reason.
    pub fn partition_tuples(&self, g: &GroupDescriptor) -> (Vec<InequalityConfig>, Vec<Rejected>) {
        let mut ok = Vec::new();
        let mut skipped = Vec::new();
        let mut ps = self.inequality.p.clone();
        let mut bs = self.inequality.beta.clone();
        let mut gs = self.inequality.gamma.clone();
        for v in [&mut ps, &mut bs, &mut gs] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        for &p in &ps {
            for &b in &bs {
                for &c in &gs {
                    match InequalityConfig::for_group(g, p, b, c) {
                        Ok(cfg) => ok.push(cfg),
                        Err(e) => skipped.push((p, b, c, e.to_string())),
                    }
                }
            }
        }
        (ok, skipped)
    }

    pub fn admissible_tuples(&self, g: &GroupDescriptor) -> Vec<InequalityConfig> {
        self.partition_tuples(g).0
    }

    /// SHA-256 of the canonical JSON of everything except the output location.
    pub fn hash_hex(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(map) = &mut v {
            map.remove("out");
        }
        hex_digest(v.to_string().as_bytes())
    }

    /// Hash of the settings calibration depends on.
    pub fn calibration_hash(&self) -> String {
        let v = serde_json::json!({
            "group": self.group,
            "cutoff": self.cutoff,
            "grid": self.grid,
            "quad": self.quad,
            "haar": self.haar,
            "calibration_family": self.calibration_family,
        });
        hex_digest(v.to_string().as_bytes())
    }
}
