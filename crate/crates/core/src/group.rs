//! Heisenberg-type groups in exponential coordinates: group law, dilations,
//! the Koranyi-type homogeneous norm and tensor-product Haar quadrature.
//!
//! A point is stored as `(p, q, t)` where `(p, q)` are the coordinates of the
//! first layer in the fixed reference basis and `t` the central coordinates.
//! The bracket of the first layer is `[V, V']_j = <J_j V, V'>` for the
//! structure matrices `J_j`; for `H^n` this is `p.q' - q.p'`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quadrature::{AxisRule, QuadRule};

const STRUCTURE_TOL: f64 = 1e-12;

/// Element of the group in exponential coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: Vec<f64>,
}

impl GroupPoint {
    pub fn new(p: Vec<f64>, q: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::Dimension(format!("p has {} entries, q has {}", p.len(), q.len())));
        }
        if p.iter().chain(&q).chain(&t).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("group point".into()));
        }
        Ok(Self { p, q, t })
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self { p: vec![0.0; n], q: vec![0.0; n], t: vec![0.0; k] }
    }

    /// First-layer coordinates `(p, q)` as one vector of length `2n`.
    pub fn v(&self) -> Vec<f64> {
        self.p.iter().chain(&self.q).copied().collect()
    }

    pub fn from_parts(v: &[f64], t: &[f64]) -> Self {
        let n = v.len() / 2;
        Self { p: v[..n].to_vec(), q: v[n..].to_vec(), t: t.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn k(&self) -> usize {
        self.t.len()
    }

    pub fn v_norm_sq(&self) -> f64 {
        self.p.iter().chain(&self.q).map(|x| x * x).sum()
    }

    pub fn t_norm_sq(&self) -> f64 {
        self.t.iter().map(|x| x * x).sum()
    }
}

/// How the descriptor was specified; this is also its JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DescriptorSpec {
    Heisenberg { n: usize },
    Htype { n: usize, k: usize, j_generators: Vec<Vec<Vec<f64>>> },
}

/// A Metivier group of Heisenberg type: `J_lambda = sum_j lambda_j J_j` with
/// `J_lambda^2 = -|lambda|^2 Id`, so every frequency is `eta_j = |lambda|`.
#[derive(Debug, Clone)]
pub struct GroupDescriptor {
    spec: DescriptorSpec,
    n: usize,
    k: usize,
    generators: Vec<DMatrix<f64>>,
}

/// Orthonormal almost-symplectic basis attached to a frequency `lambda`.
///
/// Columns `0..n` are `P_1..P_n`, columns `n..2n` are `Q_1..Q_n`; they satisfy
/// `J_lambda P_j = -eta_j Q_j`, which is the orientation under which
/// `pi_lambda` composes as a homomorphism for the group law above.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub basis: DMatrix<f64>,
}

impl Chart {
    /// Reference coordinates `v` to chart coordinates `(p(lambda), q(lambda))`.
    pub fn to_chart(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.basis.nrows();
        (0..dim)
            .map(|c| (0..dim).map(|r| self.basis[(r, c)] * v[r]).sum())
            .collect()
    }

    pub fn from_chart(&self, pq: &[f64]) -> Vec<f64> {
        let dim = self.basis.nrows();
        (0..dim)
            .map(|r| (0..dim).map(|c| self.basis[(r, c)] * pq[c]).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.basis == DMatrix::identity(self.basis.nrows(), self.basis.ncols())
    }
}

fn standard_symplectic(n: usize) -> DMatrix<f64> {
    // J (p, q) = (-q, p)
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(n + i, i)] = 1.0;
        j[(i, n + i)] = -1.0;
    }
    j
}

impl GroupDescriptor {
    /// The Heisenberg group `H^n` (`k = 1`).
    pub fn heisenberg(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        Ok(Self {
            spec: DescriptorSpec::Heisenberg { n },
            n,
            k: 1,
            generators: vec![standard_symplectic(n)],
        })
    }

    /// H-type group from `k` skew matrices of size `2n` that square to `-Id`
    /// and pairwise anticommute.
    pub fn htype(n: usize, generators: Vec<DMatrix<f64>>) -> Result<Self> {
        if n == 0 || generators.is_empty() {
            return Err(Error::InvalidParameter("n and k must be positive".into()));
        }
        let dim = 2 * n;
        let id = DMatrix::<f64>::identity(dim, dim);
        for (i, j) in generators.iter().enumerate() {
            if j.nrows() != dim || j.ncols() != dim {
                return Err(Error::Dimension(format!("generator {i} is not {dim}x{dim}")));
            }
            if (j + j.transpose()).amax() > STRUCTURE_TOL {
                return Err(Error::InvalidParameter(format!("generator {i} is not skew-symmetric")));
            }
            if (j * j + &id).amax() > STRUCTURE_TOL {
                return Err(Error::InvalidParameter(format!("generator {i} does not square to -Id")));
            }
            for (l, other) in generators.iter().enumerate().skip(i + 1) {
                if (j * other + other * j).amax() > STRUCTURE_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "generators {i} and {l} do not anticommute"
                    )));
                }
            }
        }
        let spec = DescriptorSpec::Htype {
            n,
            k: generators.len(),
            j_generators: generators
                .iter()
                .map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect())
                .collect(),
        };
        Ok(Self { spec, n, k: generators.len(), generators })
    }

    /// The quaternionic H-type group with `n = 2`, `k = 3`.
    pub fn quaternionic() -> Self {
        // left multiplication by i, j, k on R^4 = H
        let rows = [
            [[0., -1., 0., 0.], [1., 0., 0., 0.], [0., 0., 0., -1.], [0., 0., 1., 0.]],
            [[0., 0., -1., 0.], [0., 0., 0., 1.], [1., 0., 0., 0.], [0., -1., 0., 0.]],
            [[0., 0., 0., -1.], [0., 0., -1., 0.], [0., 1., 0., 0.], [1., 0., 0., 0.]],
        ];
        let gens = rows
            .iter()
            .map(|m| DMatrix::from_fn(4, 4, |r, c| m[r][c]))
            .collect();
        Self::htype(2, gens).expect("quaternion units form an H-type structure")
    }

    pub fn from_spec(spec: &DescriptorSpec) -> Result<Self> {
        match spec {
            DescriptorSpec::Heisenberg { n } => Self::heisenberg(*n),
            DescriptorSpec::Htype { n, k, j_generators } => {
                if j_generators.len() != *k {
                    return Err(Error::Dimension(format!(
                        "k = {k} but {} generators given",
                        j_generators.len()
                    )));
                }
                let dim = 2 * n;
                let gens = j_generators
                    .iter()
                    .map(|rows| {
                        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                            return Err(Error::Dimension(format!("generator is not {dim}x{dim}")));
                        }
                        Ok(DMatrix::from_fn(dim, dim, |r, c| rows[r][c]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::htype(*n, gens)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DescriptorSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn spec(&self) -> &DescriptorSpec {
        &self.spec
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("descriptor spec serializes")
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash_hex(&self) -> String {
        hex_digest(self.to_json().as_bytes())
    }

    pub fn hash_bytes(&self) -> [u8; 32] {
        Sha256::digest(self.to_json().as_bytes()).into()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Homogeneous dimension `2n + 2k`.
    pub fn homogeneous_dim(&self) -> usize {
        2 * self.n + 2 * self.k
    }

    pub fn is_heisenberg(&self) -> bool {
        matches!(self.spec, DescriptorSpec::Heisenberg { .. })
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn identity(&self) -> GroupPoint {
        GroupPoint::identity(self.n, self.k)
    }

    /// `J_lambda = sum_j lambda_j J_j`.
    pub fn j_map(&self, lambda: &[f64]) -> Result<DMatrix<f64>> {
        self.check_lambda(lambda)?;
        let dim = 2 * self.n;
        let mut j = DMatrix::zeros(dim, dim);
        for (l, g) in lambda.iter().zip(&self.generators) {
            j += g * *l;
        }
        Ok(j)
    }

    /// Frequencies `eta_j(lambda)`; all equal to `|lambda|` for H-type groups.
    pub fn eta(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        self.check_lambda(lambda)?;
        let norm = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("lambda must be nonzero".into()));
        }
        Ok(vec![norm; self.n])
    }

    fn check_lambda(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.k {
            return Err(Error::Dimension(format!("lambda has {} entries, k = {}", lambda.len(), self.k)));
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("lambda".into()));
        }
        Ok(())
    }

    /// Almost-symplectic chart at `lambda`.
    ///
    /// For `H^n` the chart is the reference basis when `lambda < 0` and the
    /// reference basis with `P` and `Q` exchanged when `lambda > 0`. For other
    /// H-type groups `P_j` is built by Gram-Schmidt from the reference axes and
    /// `Q_j = -J_lambda P_j / |lambda|`. The chart depends only on the
    /// direction of `lambda`.
    pub fn chart(&self, lambda: &[f64]) -> Result<Chart> {
        let eta = self.eta(lambda)?;
        let n = self.n;
        let dim = 2 * n;
        if self.is_heisenberg() {
            let basis = if lambda[0] < 0.0 {
                DMatrix::identity(dim, dim)
            } else {
                DMatrix::from_fn(dim, dim, |r, c| if (r + n) % dim == c { 1.0 } else { 0.0 })
            };
            return Ok(Chart { basis });
        }
        let k_mat = self.j_map(lambda)? / eta[0];
        let mut ps: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
        let mut qs: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
        for axis in 0..dim {
            if ps.len() == n {
                break;
            }
            let mut cand = nalgebra::DVector::<f64>::zeros(dim);
            cand[axis] = 1.0;
            for b in ps.iter().chain(&qs) {
                let c = b.dot(&cand);
                cand -= b * c;
            }
            let norm = cand.norm();
            if norm < 1e-8 {
                continue;
            }
            cand /= norm;
            let q = -(&k_mat * &cand);
            ps.push(cand);
            qs.push(q);
        }
        if ps.len() != n {
            return Err(Error::InvalidParameter("failed to build an almost-symplectic basis".into()));
        }
        let mut basis = DMatrix::zeros(dim, dim);
        for j in 0..n {
            basis.set_column(j, &ps[j]);
            basis.set_column(n + j, &qs[j]);
        }
        Ok(Chart { basis })
    }

    /// Bracket `[V, V']` as a vector in the centre.
    pub fn commutator(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let dim = 2 * self.n;
        self.generators
            .iter()
            .map(|j| {
                let mut s = 0.0;
                for r in 0..dim {
                    let mut jv = 0.0;
                    for c in 0..dim {
                        jv += j[(r, c)] * v[c];
                    }
                    s += jv * w[r];
                }
                s
            })
            .collect()
    }

    fn check_point(&self, x: &GroupPoint) -> Result<()> {
        if x.p.len() != self.n || x.q.len() != self.n || x.t.len() != self.k {
            return Err(Error::Dimension(format!(
                "point has shape ({}, {}, {}), group has n = {}, k = {}",
                x.p.len(),
                x.q.len(),
                x.t.len(),
                self.n,
                self.k
            )));
        }
        Ok(())
    }

    /// Group product `(V, Z)(V', Z') = (V + V', Z + Z' + [V, V'] / 2)`.
    pub fn multiply(&self, a: &GroupPoint, b: &GroupPoint) -> Result<GroupPoint> {
        self.check_point(a)?;
        self.check_point(b)?;
        let c = self.commutator(&a.v(), &b.v());
        Ok(GroupPoint {
            p: a.p.iter().zip(&b.p).map(|(x, y)| x + y).collect(),
            q: a.q.iter().zip(&b.q).map(|(x, y)| x + y).collect(),
            t: a.t.iter().zip(&b.t).zip(&c).map(|((x, y), c)| x + y + 0.5 * c).collect(),
        })
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn inverse(x: &GroupPoint) -> GroupPoint {
    GroupPoint {
        p: x.p.iter().map(|v| -v).collect(),
        q: x.q.iter().map(|v| -v).collect(),
        t: x.t.iter().map(|v| -v).collect(),
    }
}

/// `delta_r (V, Z) = (r V, r^2 Z)`.
pub fn dilate(x: &GroupPoint, r: f64) -> Result<GroupPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {r}")));
    }
    let r2 = r * r;
    Ok(GroupPoint {
        p: x.p.iter().map(|v| r * v).collect(),
        q: x.q.iter().map(|v| r * v).collect(),
        t: x.t.iter().map(|v| r2 * v).collect(),
    })
}

/// `(|v|^4 + |t|^2)^{1/4}`.
pub fn hom_norm(x: &GroupPoint) -> f64 {
    let v2 = x.v_norm_sq();
    (v2 * v2 + x.t_norm_sq()).sqrt().sqrt()
}

/// Largest observed `|xy| / (|x| + |y|)` over the given pairs.
pub fn quasi_triangle_constant(g: &GroupDescriptor, pairs: &[(GroupPoint, GroupPoint)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, y) in pairs {
        let denom = hom_norm(x) + hom_norm(y);
        if denom > 0.0 {
            worst = worst.max(hom_norm(&g.multiply(x, y)?) / denom);
        }
    }
    Ok(worst)
}

/// Truncation box `[-v_half, v_half]^{2n} x [-t_half, t_half]^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarBox {
    pub v_half: f64,
    pub t_half: f64,
}

impl HaarBox {
    /// Box for `f o delta_{1/r}` when `self` fits `f`.
    pub fn scaled(&self, r: f64) -> Self {
        Self { v_half: self.v_half * r, t_half: self.t_half * r * r }
    }
}

/// Per-axis node counts for the tensor rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarResolution {
    pub v_nodes: usize,
    pub t_nodes: usize,
    #[serde(default)]
    pub rule: AxisRule,
}

impl Default for HaarResolution {
    fn default() -> Self {
        Self { v_nodes: 40, t_nodes: 40, rule: AxisRule::GaussLegendre }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HaarResult {
    pub value: Complex64,
    pub nodes: usize,
    /// Largest `|f|` on the outermost layer of nodes; a proxy for the box tail.
    pub shell_max: f64,
}

/// Tensor-product quadrature of `int_G f(x) dx` with `dx = dV dZ`.
pub fn haar_integral<F>(
    g: &GroupDescriptor,
    f: F,
    bx: &HaarBox,
    res: &HaarResolution,
) -> Result<HaarResult>
where
    F: Fn(&GroupPoint) -> Complex64 + Sync,
{
    if res.v_nodes == 0 || res.t_nodes == 0 {
        return Err(Error::InvalidParameter("node counts must be positive".into()));
    }
    let v_rule = res.rule.build(res.v_nodes, bx.v_half);
    let t_rule = res.rule.build(res.t_nodes, bx.t_half);
    let mut axes: Vec<&QuadRule> = Vec::new();
    for _ in 0..2 * g.n() {
        axes.push(&v_rule);
    }
    for _ in 0..g.k() {
        axes.push(&t_rule);
    }
    let (value, shell, bad) = tensor_sum(&axes, g.n(), |x| f(x));
    if bad {
        return Err(Error::NonFinite("haar_integral samples".into()));
    }
    let nodes = axes.iter().map(|a| a.len()).product();
    Ok(HaarResult { value, nodes, shell_max: shell })
}

/// Sum of `w(x) f(x)` over a tensor grid whose first `2n` axes are the first
/// layer and the rest the centre. Returns (sum, shell max, saw non-finite).
pub(crate) fn tensor_sum<F>(axes: &[&QuadRule], n: usize, f: F) -> (Complex64, f64, bool)
where
    F: Fn(&GroupPoint) -> Complex64 + Sync,
{
    let dims: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let outer = dims[0];
    let inner: usize = dims[1..].iter().product();
    let partials: Vec<(Complex64, f64, bool)> = (0..outer)
        .into_par_iter()
        .map(|i0| {
            let mut coords = vec![0.0; dims.len()];
            let mut idx = vec![0usize; dims.len()];
            let mut point = GroupPoint {
                p: vec![0.0; n],
                q: vec![0.0; n],
                t: vec![0.0; dims.len() - 2 * n],
            };
            let mut acc = Complex64::new(0.0, 0.0);
            let mut shell = 0.0f64;
            let mut bad = false;
            for flat in 0..inner {
                let mut rem = flat;
                idx[0] = i0;
                for a in (1..dims.len()).rev() {
                    idx[a] = rem % dims[a];
                    rem /= dims[a];
                }
                let mut w = 1.0;
                let mut on_shell = false;
                for a in 0..dims.len() {
                    coords[a] = axes[a].nodes[idx[a]];
                    w *= axes[a].weights[idx[a]];
                    on_shell |= idx[a] == 0 || idx[a] + 1 == dims[a];
                }
                point.p.copy_from_slice(&coords[..n]);
                point.q.copy_from_slice(&coords[n..2 * n]);
                point.t.copy_from_slice(&coords[2 * n..]);
                let val = f(&point);
                if !val.re.is_finite() || !val.im.is_finite() {
                    bad = true;
                    continue;
                }
                acc += val * w;
                if on_shell {
                    shell = shell.max(val.norm());
                }
            }
            (acc, shell, bad)
        })
        .collect();
    partials.into_iter().fold(
        (Complex64::new(0.0, 0.0), 0.0, false),
        |(s, m, b), (s2, m2, b2)| (s + s2, m.max(m2), b || b2),
    )
}
