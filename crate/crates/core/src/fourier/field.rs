//! `lambda -> F(f)(lambda)` sampled on a frequency grid, with Plancherel and
//! inversion sums and binary/JSON serialization.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rep_matrix, CalibrationConstants, FourierEngine, FourierQuad, LambdaGridSpec, QuadMeta, SpectralOperator};
use crate::error::{Error, Result};
use crate::functions::GroupFunction;
use crate::group::{hex_digest, GroupDescriptor, GroupPoint};
use crate::hermite::{basis_dim, SpectralParameter};
use crate::quadrature::{read_f64, read_u32, read_u64};

/// Frequency nodes with weights `w_i = (d lambda weight) * |Pf(lambda_i)|`
/// and the transform at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    pub descriptor_hash: [u8; 32],
    pub cutoff: usize,
    pub grid: LambdaGridSpec,
    pub nodes: Vec<SpectralParameter>,
    pub weights: Vec<f64>,
    pub ops: Vec<SpectralOperator>,
}

impl FourierField {
    /// Transforms `f` on the grid exactly as given.
    pub fn build(
        g: &GroupDescriptor,
        f: &dyn GroupFunction,
        grid: &LambdaGridSpec,
        cutoff: usize,
        quad: &FourierQuad,
    ) -> Result<Self> {
        let lg = grid.build(g.k())?;
        let nodes = lg
            .points
            .iter()
            .map(|l| SpectralParameter::new(g, l))
            .collect::<Result<Vec<_>>>()?;
        let engine = FourierEngine::new(g, f, *quad)?;
        // warm the per-chart sample cache before fanning out
        let mut seen: Vec<&DMatrix<f64>> = Vec::new();
        for sp in &nodes {
            if !seen.contains(&&sp.chart.basis) {
                seen.push(&sp.chart.basis);
                engine.transform(sp, 0)?;
            }
        }
        let ops = nodes
            .par_iter()
            .map(|sp| engine.transform(sp, cutoff))
            .collect::<Result<Vec<_>>>()?;
        let weights = lg.weights.iter().zip(&nodes).map(|(w, sp)| w * sp.pfaffian).collect();
        Ok(Self { descriptor_hash: g.hash_bytes(), cutoff, grid: *grid, nodes, weights, ops })
    }

    /// Transforms `f` on `grid` mapped to the function's natural scale.
    pub fn build_adapted(
        g: &GroupDescriptor,
        f: &dyn GroupFunction,
        grid: &LambdaGridSpec,
        cutoff: usize,
        quad: &FourierQuad,
    ) -> Result<Self> {
        Self::build(g, f, &grid.scaled(f.natural_scale()), cutoff, quad)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// A field with the same nodes and weights multiplied by `c`.
    pub fn with_weights_scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for w in &mut out.weights {
            *w *= c;
        }
        out
    }

    /// Entrywise `a * self + b * other` (same nodes).
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.len() != other.len() || self.cutoff != other.cutoff {
            return Err(Error::Dimension("fields have different layouts".into()));
        }
        let mut out = self.clone();
        for (o, p) in out.ops.iter_mut().zip(&other.ops) {
            o.entries = o.entries.map(|z| z * a) + p.entries.map(|z| z * b);
        }
        Ok(out)
    }

    /// `sum_i w_i ||M_i||_{S_2}^2`, without any calibration constant.
    pub fn raw_plancherel(&self) -> f64 {
        self.weights.iter().zip(&self.ops).map(|(w, m)| w * m.hs_norm_sq()).sum()
    }

    /// `sum_i w_i tr(pi_{lambda_i}(x)^* M_i)`, without any calibration constant.
    pub fn raw_inversion(&self, x: &GroupPoint) -> Result<Complex64> {
        if self.is_empty() {
            return Err(Error::Empty("Fourier field".into()));
        }
        let terms = self
            .ops
            .par_iter()
            .zip(&self.weights)
            .map(|(m, w)| {
                let pi = rep_matrix(x, &m.sp, m.cutoff)?;
                let tr: Complex64 = pi.iter().zip(m.entries.iter()).map(|(a, b)| a.conj() * b).sum();
                Ok(tr * *w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(terms.into_iter().sum())
    }
}

/// `C * sum_i w_i ||M_i||_{S_2}^2`.
pub fn plancherel_sum(field: &FourierField, consts: &CalibrationConstants) -> Result<f64> {
    if field.is_empty() {
        return Err(Error::Empty("Fourier field".into()));
    }
    Ok(consts.plancherel_c * field.raw_plancherel())
}

/// `kappa * sum_i w_i tr(pi_{lambda_i}(x)^* M_i)`.
pub fn invert(field: &FourierField, x: &GroupPoint, consts: &CalibrationConstants) -> Result<Complex64> {
    Ok(field.raw_inversion(x)? * consts.inversion_kappa)
}

const FIELD_MAGIC: &[u8; 4] = b"HPWF";
const FIELD_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NodeJson {
    lambda: Vec<f64>,
    weight: f64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    meta: Option<QuadMeta>,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    format: String,
    version: u32,
    descriptor_hash: String,
    n: usize,
    k: usize,
    cutoff: usize,
    grid: LambdaGridSpec,
    nodes: Vec<NodeJson>,
}

impl FourierField {
    fn check_group(&self, g: &GroupDescriptor) -> Result<()> {
        if self.descriptor_hash != g.hash_bytes() {
            return Err(Error::Format("field was computed for a different group".into()));
        }
        Ok(())
    }

    /// Binary container: magic, version, descriptor hash, `n`, `k`, cutoff,
    /// grid spec (length-prefixed JSON), node count, then per node
    /// `lambda`, weight, quadrature metadata (length-prefixed JSON) and the
    /// matrix as row-major little-endian `(re, im)` doubles.
    pub fn write_binary<W: Write>(&self, mut w: W, g: &GroupDescriptor) -> Result<()> {
        self.check_group(g)?;
        w.write_all(FIELD_MAGIC)?;
        w.write_all(&FIELD_VERSION.to_le_bytes())?;
        w.write_all(&self.descriptor_hash)?;
        for v in [g.n(), g.k(), self.cutoff] {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        let grid = serde_json::to_vec(&self.grid)?;
        w.write_all(&(grid.len() as u64).to_le_bytes())?;
        w.write_all(&grid)?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for (op, wt) in self.ops.iter().zip(&self.weights) {
            for l in &op.sp.lambda {
                w.write_all(&l.to_le_bytes())?;
            }
            w.write_all(&wt.to_le_bytes())?;
            let meta = serde_json::to_vec(&op.meta)?;
            w.write_all(&(meta.len() as u64).to_le_bytes())?;
            w.write_all(&meta)?;
            for r in 0..op.dim() {
                for c in 0..op.dim() {
                    let z = op.entries[(r, c)];
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R, g: &GroupDescriptor) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != FIELD_MAGIC {
            return Err(Error::Format("not a Fourier field container".into()));
        }
        let version = read_u32(&mut r)?;
        if version != FIELD_VERSION {
            return Err(Error::Format(format!("unsupported field version {version}")));
        }
        let mut hash = [0u8; 32];
        r.read_exact(&mut hash)?;
        if hash != g.hash_bytes() {
            return Err(Error::Format("field was computed for a different group".into()));
        }
        let n = read_u64(&mut r)? as usize;
        let k = read_u64(&mut r)? as usize;
        if n != g.n() || k != g.k() {
            return Err(Error::Format("dimension header does not match the group".into()));
        }
        let cutoff = read_u64(&mut r)? as usize;
        let grid: LambdaGridSpec = serde_json::from_slice(&read_blob(&mut r)?)?;
        let count = read_u64(&mut r)? as usize;
        let dim = basis_dim(n, cutoff);
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut ops = Vec::with_capacity(count);
        for _ in 0..count {
            let lambda = (0..k).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
            let weight = read_f64(&mut r)?;
            let meta: Option<QuadMeta> = serde_json::from_slice(&read_blob(&mut r)?)?;
            let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
            for row in 0..dim {
                for col in 0..dim {
                    let re = read_f64(&mut r)?;
                    let im = read_f64(&mut r)?;
                    entries[(row, col)] = Complex64::new(re, im);
                }
            }
            let sp = SpectralParameter::new(g, &lambda)?;
            nodes.push(sp.clone());
            weights.push(weight);
            ops.push(SpectralOperator { sp, cutoff, entries, meta });
        }
        Ok(Self { descriptor_hash: hash, cutoff, grid, nodes, weights, ops })
    }

    pub fn to_json(&self, g: &GroupDescriptor) -> Result<String> {
        self.check_group(g)?;
        let nodes = self
            .ops
            .iter()
            .zip(&self.weights)
            .map(|(op, w)| NodeJson {
                lambda: op.sp.lambda.clone(),
                weight: *w,
                re: op.entries.row_iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
                im: op.entries.row_iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
                meta: op.meta,
            })
            .collect();
        let doc = FieldJson {
            format: "hpw-fourier-field".into(),
            version: FIELD_VERSION,
            descriptor_hash: hex_digest(g.to_json().as_bytes()),
            n: g.n(),
            k: g.k(),
            cutoff: self.cutoff,
            grid: self.grid,
            nodes,
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str, g: &GroupDescriptor) -> Result<Self> {
        let doc: FieldJson = serde_json::from_str(text)?;
        if doc.descriptor_hash != g.hash_hex() || doc.n != g.n() || doc.k != g.k() {
            return Err(Error::Format("field was computed for a different group".into()));
        }
        let dim = basis_dim(doc.n, doc.cutoff);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut ops = Vec::new();
        for node in doc.nodes {
            if node.re.len() != dim || node.im.len() != dim || node.re.iter().chain(&node.im).any(|r| r.len() != dim) {
                return Err(Error::Format("matrix has the wrong shape".into()));
            }
            let entries = DMatrix::from_fn(dim, dim, |r, c| Complex64::new(node.re[r][c], node.im[r][c]));
            let sp = SpectralParameter::new(g, &node.lambda)?;
            nodes.push(sp.clone());
            weights.push(node.weight);
            ops.push(SpectralOperator { sp, cutoff: doc.cutoff, entries, meta: node.meta });
        }
        Ok(Self { descriptor_hash: g.hash_bytes(), cutoff: doc.cutoff, grid: doc.grid, nodes, weights, ops })
    }
}

fn read_blob<R: Read>(r: &mut R) -> Result<Vec<u8>> {
    let len = read_u64(r)? as usize;
    if len > 1 << 20 {
        return Err(Error::Format("header blob too large".into()));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    Ok(buf)
}
