//! Computation of `F(f)(lambda) = int_G f(x) pi_lambda(x) dx`.
//!
//! Writing `f^lambda(p, q) = int f(p, q, t) e^{i lambda.t} dt` in chart
//! coordinates, the matrix entries are
//!
//! ```text
//! M[gamma, alpha] = int dxi Phi_gamma(xi) int dq Phi_alpha(xi + q)
//!                   int dp f^lambda(p, q) e^{i sum_j eta_j p_j (xi_j + q_j / 2)}
//! ```
//!
//! and the three inner integrals are contracted one after another, which is
//! far cheaper than forming a matrix element at every `(p, q)` node.

use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{FourierQuad, QuadMeta, SpectralOperator};
use crate::error::{Error, Result};
use crate::functions::GroupFunction;
use crate::group::{GroupDescriptor, GroupPoint, HaarBox};
use crate::hermite::{enumerate_multi_indices, hermite_all, SpectralParameter};
use crate::quadrature::{gauss_hermite, trapezoid, QuadRule};

/// Writes the base-`size` digits of `flat` (most significant first) into `out`.
#[inline]
fn decode(mut flat: usize, size: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = flat % size;
        flat /= size;
    }
}

type Samples = Arc<Vec<Complex64>>;

/// Reusable transform state for one function: quadrature rules and cached
/// samples of `f` on the chart grid (one sample set per distinct chart).
pub struct FourierEngine<'a> {
    g: &'a GroupDescriptor,
    f: &'a dyn GroupFunction,
    quad: FourierQuad,
    bx: HaarBox,
    pq_rule: QuadRule,
    t_rule: QuadRule,
    cache: Mutex<Vec<(DMatrix<f64>, Samples)>>,
}

impl<'a> FourierEngine<'a> {
    pub fn new(g: &'a GroupDescriptor, f: &'a dyn GroupFunction, quad: FourierQuad) -> Result<Self> {
        if quad.pq_nodes < 2 || quad.t_nodes < 2 {
            return Err(Error::InvalidParameter("transform needs at least 2 nodes per axis".into()));
        }
        let bx = f.decay_box();
        if !(bx.v_half > 0.0 && bx.t_half > 0.0) {
            return Err(Error::InvalidParameter("decay box must have positive extent".into()));
        }
        Ok(Self {
            g,
            f,
            quad,
            bx,
            pq_rule: trapezoid(quad.pq_nodes, -bx.v_half, bx.v_half),
            t_rule: trapezoid(quad.t_nodes, -bx.t_half, bx.t_half),
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn quad(&self) -> FourierQuad {
        self.quad
    }

    fn samples(&self, sp: &SpectralParameter) -> Result<Samples> {
        let basis = &sp.chart.basis;
        if let Some((_, s)) = self.cache.lock().unwrap().iter().find(|(b, _)| b == basis) {
            return Ok(s.clone());
        }
        let n = self.g.n();
        let k = self.g.k();
        let np = self.pq_rule.len();
        let nt = self.t_rule.len();
        let n_pq = np.pow(2 * n as u32);
        let n_t = nt.pow(k as u32);
        let rows: Vec<Vec<Complex64>> = (0..n_pq)
            .into_par_iter()
            .map(|pq_flat| {
                let mut digits = vec![0usize; 2 * n];
                decode(pq_flat, np, &mut digits);
                let chart_pq: Vec<f64> = digits.iter().map(|&d| self.pq_rule.nodes[d]).collect();
                let v = sp.chart.from_chart(&chart_pq);
                let mut point = GroupPoint::from_parts(&v, &vec![0.0; k]);
                let mut tdig = vec![0usize; k];
                (0..n_t)
                    .map(|t_flat| {
                        decode(t_flat, nt, &mut tdig);
                        for (slot, &d) in point.t.iter_mut().zip(&tdig) {
                            *slot = self.t_rule.nodes[d];
                        }
                        self.f.eval(&point)
                    })
                    .collect()
            })
            .collect();
        let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
        if flat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("function samples".into()));
        }
        let arc = Arc::new(flat);
        self.cache.lock().unwrap().push((basis.clone(), arc.clone()));
        Ok(arc)
    }

    /// Truncated `F(f)(lambda)` at cutoff `N`.
    pub fn transform(&self, sp: &SpectralParameter, cutoff: usize) -> Result<SpectralOperator> {
        let n = self.g.n();
        let k = self.g.k();
        if sp.n() != n || sp.lambda.len() != k {
            return Err(Error::Dimension("spectral parameter does not match the group".into()));
        }
        let samples = self.samples(sp)?;
        let np = self.pq_rule.len();
        let nt = self.t_rule.len();
        let n_half = np.pow(n as u32);
        let n_t = nt.pow(k as u32);
        let mx = self.quad.xi_nodes_for(cutoff);
        let gh = gauss_hermite(mx);
        let nx = n_half_pow(mx, n);

        // f^lambda(p, q) with the t-weights folded in
        let mut tdig = vec![0usize; k];
        let phase_t: Vec<Complex64> = (0..n_t)
            .map(|t_flat| {
                decode(t_flat, nt, &mut tdig);
                let mut w = 1.0;
                let mut arg = 0.0;
                for (j, &d) in tdig.iter().enumerate() {
                    w *= self.t_rule.weights[d];
                    arg += sp.lambda[j] * self.t_rule.nodes[d];
                }
                Complex64::from_polar(w, arg)
            })
            .collect();
        let f_lambda: Vec<Complex64> = samples
            .par_chunks(n_t)
            .map(|row| row.iter().zip(&phase_t).map(|(s, p)| s * p).sum())
            .collect();

        // xi nodes per axis (chart coordinates) and their weights
        let xi: Vec<Vec<f64>> = sp.eta.iter().map(|e| gh.nodes.iter().map(|s| s / e.sqrt()).collect()).collect();
        let xi_w: Vec<Vec<f64>> = sp
            .eta
            .iter()
            .map(|e| gh.scaled_weights.iter().map(|w| w / e.sqrt()).collect())
            .collect();

        // G(q, xi) = sum_p w_p f^lambda(p, q) prod_j e^{i eta_j p_j (xi_j + q_j / 2)}
        let kernels: Vec<DMatrix<Complex64>> = (0..n)
            .map(|j| {
                DMatrix::from_fn(mx, np, |r, c| Complex64::from_polar(1.0, sp.eta[j] * self.pq_rule.nodes[c] * xi[j][r]))
            })
            .collect();
        let g_qx: Vec<Vec<Complex64>> = (0..n_half)
            .into_par_iter()
            .map(|q_flat| {
                let mut qd = vec![0usize; n];
                decode(q_flat, np, &mut qd);
                let mut pd = vec![0usize; n];
                let mut data: Vec<Complex64> = (0..n_half)
                    .map(|p_flat| {
                        decode(p_flat, np, &mut pd);
                        let mut c = Complex64::new(1.0, 0.0);
                        for j in 0..n {
                            let p = self.pq_rule.nodes[pd[j]];
                            let q = self.pq_rule.nodes[qd[j]];
                            c *= Complex64::from_polar(self.pq_rule.weights[pd[j]], 0.5 * sp.eta[j] * p * q);
                        }
                        c * f_lambda[p_flat * n_half + q_flat]
                    })
                    .collect();
                let mut dims = vec![np; n];
                for j in 0..n {
                    data = axis_apply(&data, &dims, j, &kernels[j]);
                    dims[j] = mx;
                }
                data
            })
            .collect();

        // Hermite tables: herm_shift[j][(xi_i * np + q_i) * (N+1) + m] = phi_{m, eta_j}(xi_i + q_i)
        let d1 = cutoff + 1;
        let herm_shift: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let e = sp.eta[j];
                let scale = e.powf(0.25);
                let mut tab = vec![0.0; mx * np * d1];
                let mut buf = vec![0.0; d1];
                for (xi_i, &x) in xi[j].iter().enumerate().take(mx) {
                    for q_i in 0..np {
                        hermite_all(cutoff, e.sqrt() * (x + self.pq_rule.nodes[q_i]), &mut buf);
                        let base = (xi_i * np + q_i) * d1;
                        for m in 0..d1 {
                            tab[base + m] = scale * buf[m];
                        }
                    }
                }
                tab
            })
            .collect();
        let herm_xi: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let scale = sp.eta[j].powf(0.25);
                let mut tab = vec![0.0; mx * d1];
                let mut buf = vec![0.0; d1];
                for (xi_i, &s) in gh.nodes.iter().enumerate() {
                    hermite_all(cutoff, s, &mut buf);
                    for m in 0..d1 {
                        tab[xi_i * d1 + m] = scale * buf[m];
                    }
                }
                tab
            })
            .collect();

        let idx = enumerate_multi_indices(n, cutoff);
        let dim = idx.len();
        let q_weight: Vec<f64> = (0..n_half)
            .map(|q_flat| {
                let mut qd = vec![0usize; n];
                decode(q_flat, np, &mut qd);
                qd.iter().map(|&d| self.pq_rule.weights[d]).product()
            })
            .collect();

        // S[xi, alpha] = sum_q w_q G(q, xi) Phi_alpha(xi + q), then contract with Phi_gamma(xi)
        let partial: Vec<DMatrix<Complex64>> = (0..nx)
            .into_par_iter()
            .map(|xi_flat| {
                let mut xd = vec![0usize; n];
                decode(xi_flat, mx, &mut xd);
                let mut qd = vec![0usize; n];
                let mut s_row = vec![Complex64::new(0.0, 0.0); dim];
                for q_flat in 0..n_half {
                    let gq = g_qx[q_flat][xi_flat] * q_weight[q_flat];
                    if gq == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    decode(q_flat, np, &mut qd);
                    if n == 1 {
                        let base = (xd[0] * np + qd[0]) * d1;
                        let tab = &herm_shift[0][base..base + d1];
                        for (a, slot) in s_row.iter_mut().enumerate() {
                            *slot += gq * tab[a];
                        }
                    } else {
                        for (a, al) in idx.iter().enumerate() {
                            let mut h = 1.0;
                            for j in 0..n {
                                h *= herm_shift[j][(xd[j] * np + qd[j]) * d1 + al.entries[j]];
                            }
                            s_row[a] += gq * h;
                        }
                    }
                }
                let mut w = 1.0;
                let phi_g: Vec<f64> = idx
                    .iter()
                    .map(|ga| {
                        let mut h = 1.0;
                        for j in 0..n {
                            h *= herm_xi[j][xd[j] * d1 + ga.entries[j]];
                        }
                        h
                    })
                    .collect();
                for j in 0..n {
                    w *= xi_w[j][xd[j]];
                }
                DMatrix::from_fn(dim, dim, |r, c| s_row[c] * (w * phi_g[r]))
            })
            .collect();
        let mut entries = DMatrix::<Complex64>::zeros(dim, dim);
        for m in partial {
            entries += m;
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("transform matrix".into()));
        }
        Ok(SpectralOperator {
            sp: sp.clone(),
            cutoff,
            entries,
            meta: Some(QuadMeta {
                pq_nodes: self.quad.pq_nodes,
                t_nodes: self.quad.t_nodes,
                xi_nodes: mx,
                v_half: self.bx.v_half,
                t_half: self.bx.t_half,
            }),
        })
    }
}

fn n_half_pow(m: usize, n: usize) -> usize {
    m.pow(n as u32)
}

/// Applies `kernel` (out_len x in_len) along `axis` of a row-major tensor.
fn axis_apply(data: &[Complex64], dims: &[usize], axis: usize, kernel: &DMatrix<Complex64>) -> Vec<Complex64> {
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let len_in = dims[axis];
    let len_out = kernel.nrows();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * len_out * inner];
    for o in 0..outer {
        for r in 0..len_out {
            for c in 0..len_in {
                let kv = kernel[(r, c)];
                let src = (o * len_in + c) * inner;
                let dst = (o * len_out + r) * inner;
                for i in 0..inner {
                    out[dst + i] += kv * data[src + i];
                }
            }
        }
    }
    out
}

/// Truncated `F(f)(lambda)` for a single frequency.
pub fn gft(
    g: &GroupDescriptor,
    f: &dyn GroupFunction,
    sp: &SpectralParameter,
    cutoff: usize,
    quad: &FourierQuad,
) -> Result<SpectralOperator> {
    FourierEngine::new(g, f, *quad)?.transform(sp, cutoff)
}

/// `f^mu(v) = int f(v, t) e^{i mu.t} dt` by the trapezoid rule on the
/// function's central decay interval, `t_nodes` nodes per central axis.
pub fn partial_central_fourier(f: &dyn GroupFunction, mu: &[f64], v: &[f64], t_nodes: usize) -> Result<Complex64> {
    let k = mu.len();
    if !v.len().is_multiple_of(2) || k == 0 {
        return Err(Error::Dimension("v must have even length and mu at least one entry".into()));
    }
    let bx = f.decay_box();
    let rule = trapezoid(t_nodes.max(2), -bx.t_half, bx.t_half);
    let nt = rule.len();
    let mut point = GroupPoint::from_parts(v, &vec![0.0; k]);
    let mut digits = vec![0usize; k];
    let mut acc = Complex64::new(0.0, 0.0);
    for t_flat in 0..nt.pow(k as u32) {
        decode(t_flat, nt, &mut digits);
        let mut w = 1.0;
        let mut arg = 0.0;
        for (j, &d) in digits.iter().enumerate() {
            point.t[j] = rule.nodes[d];
            w *= rule.weights[d];
            arg += mu[j] * rule.nodes[d];
        }
        let val = f.eval(&point);
        if !val.re.is_finite() || !val.im.is_finite() {
            return Err(Error::NonFinite("partial central Fourier samples".into()));
        }
        acc += val * Complex64::from_polar(w, arg);
    }
    Ok(acc)
}
