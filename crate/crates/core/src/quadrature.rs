//! One-dimensional quadrature rules: Gauss-Hermite, Gauss-Legendre and the
//! uniform trapezoid rule, plus a process-wide cache of Gauss-Hermite tables.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::hermite_all;

/// Nodes and weights of a one-dimensional rule, `sum_i w_i g(x_i) ~ int g`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// Affine image of a rule on `[-1, 1]` onto `[a, b]`.
    fn mapped(reference: &QuadRule, a: f64, b: f64) -> QuadRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        QuadRule {
            nodes: reference.nodes.iter().map(|x| mid + half * x).collect(),
            weights: reference.weights.iter().map(|w| half * w).collect(),
        }
    }
}

/// Gauss-Hermite rule for the weight `exp(-x^2)`.
///
/// `scaled_weights[i] = weights[i] * exp(nodes[i]^2)` are kept separately so
/// that integrals of functions that already carry their own Gaussian decay can
/// be formed without the intermediate underflow of `weights`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Hermite nodes and weights, exact for `exp(-x^2) * poly` up to degree
/// `2 * count - 1`.
///
/// Nodes come from the symmetric Jacobi matrix (Golub-Welsch) and are then
/// polished with Newton steps on the normalized Hermite function; weights use
/// the Christoffel sum, which stays accurate in the tails where the
/// eigenvector formula loses relative precision.
pub fn gauss_hermite_nodes(count: usize) -> Result<GaussHermite> {
    if count == 0 {
        return Err(Error::InvalidParameter("Gauss-Hermite count must be >= 1".into()));
    }
    let mut jacobi = DMatrix::<f64>::zeros(count, count);
    for k in 1..count {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut buf = vec![0.0; count + 1];
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            hermite_all(count, *x, &mut buf);
            let f = buf[count];
            let df = (2.0 * count as f64).sqrt() * buf[count - 1] - *x * f;
            if df == 0.0 || !df.is_finite() {
                break;
            }
            let step = f / df;
            *x -= step;
            if step.abs() < 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
    }
    // exact symmetry
    for i in 0..count / 2 {
        let s = 0.5 * (nodes[count - 1 - i] - nodes[i]);
        nodes[i] = -s;
        nodes[count - 1 - i] = s;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }

    let mut weights = Vec::with_capacity(count);
    let mut scaled_weights = Vec::with_capacity(count);
    for &x in &nodes {
        hermite_all(count - 1, x, &mut buf[..count]);
        let christoffel: f64 = buf[..count].iter().map(|v| v * v).sum();
        let scaled = 1.0 / christoffel;
        scaled_weights.push(scaled);
        weights.push(scaled * (-x * x).exp());
    }
    Ok(GaussHermite { nodes, weights, scaled_weights })
}

static GH_CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();

/// Cached Gauss-Hermite table; computed once per count and shared read-only.
pub fn gauss_hermite(count: usize) -> Arc<GaussHermite> {
    let cache = GH_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&count) {
        return rule.clone();
    }
    let rule = Arc::new(gauss_hermite_nodes(count.max(1)).expect("count >= 1"));
    cache.lock().unwrap().entry(count).or_insert(rule).clone()
}

/// Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre(count: usize, a: f64, b: f64) -> QuadRule {
    let reference = gauss_legendre_reference(count);
    QuadRule::mapped(&reference, a, b)
}

fn gauss_legendre_reference(count: usize) -> QuadRule {
    let n = count.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite trapezoid rule with `count` equispaced nodes including both ends.
pub fn trapezoid(count: usize, a: f64, b: f64) -> QuadRule {
    if count <= 1 {
        return QuadRule { nodes: vec![0.5 * (a + b)], weights: vec![b - a] };
    }
    let h = (b - a) / (count - 1) as f64;
    let nodes = (0..count).map(|i| a + h * i as f64).collect();
    let weights = (0..count)
        .map(|i| if i == 0 || i == count - 1 { 0.5 * h } else { h })
        .collect();
    QuadRule { nodes, weights }
}

/// Which one-dimensional rule a tensor grid uses along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AxisRule {
    #[default]
    GaussLegendre,
    Trapezoid,
}

impl AxisRule {
    pub fn build(self, count: usize, half_width: f64) -> QuadRule {
        match self {
            AxisRule::GaussLegendre => gauss_legendre(count, -half_width, half_width),
            AxisRule::Trapezoid => trapezoid(count, -half_width, half_width),
        }
    }
}

const GH_MAGIC: &[u8; 4] = b"GHRT";
const GH_VERSION: u32 = 1;

/// Writes a Gauss-Hermite table as little-endian doubles:
/// magic, version (u32), count (u64), nodes, weights, scaled weights.
pub fn write_gauss_hermite_table<W: Write>(mut w: W, rule: &GaussHermite) -> Result<()> {
    w.write_all(GH_MAGIC)?;
    w.write_all(&GH_VERSION.to_le_bytes())?;
    w.write_all(&(rule.len() as u64).to_le_bytes())?;
    for column in [&rule.nodes, &rule.weights, &rule.scaled_weights] {
        for v in column.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_gauss_hermite_table<R: Read>(mut r: R, expected_count: usize) -> Result<GaussHermite> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != GH_MAGIC {
        return Err(Error::Format("not a Gauss-Hermite table".into()));
    }
    let version = read_u32(&mut r)?;
    if version != GH_VERSION {
        return Err(Error::Format(format!("unsupported table version {version}")));
    }
    let count = read_u64(&mut r)? as usize;
    if count != expected_count {
        return Err(Error::Format(format!(
            "table holds {count} nodes, expected {expected_count}"
        )));
    }
    let mut read_column = || -> Result<Vec<f64>> { (0..count).map(|_| read_f64(&mut r)).collect() };
    let nodes = read_column()?;
    let weights = read_column()?;
    let scaled_weights = read_column()?;
    Ok(GaussHermite { nodes, weights, scaled_weights })
}

/// Loads the table for `count` from `dir`, computing and storing it on a miss.
pub fn cached_gauss_hermite_file(dir: &Path, count: usize) -> Result<GaussHermite> {
    let path = dir.join(format!("gauss_hermite_{count}.bin"));
    if let Ok(file) = std::fs::File::open(&path) {
        if let Ok(rule) = read_gauss_hermite_table(std::io::BufReader::new(file), count) {
            return Ok(rule);
        }
    }
    let rule = gauss_hermite_nodes(count)?;
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("bin.tmp");
    {
        let mut file = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        write_gauss_hermite_table(&mut file, &rule)?;
        file.flush()?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(rule)
}

pub(crate) fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_point_rule() {
        let gh = gauss_hermite_nodes(1).unwrap();
        assert_eq!(gh.nodes, vec![0.0]);
        assert!((gh.weights[0] - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn two_point_rule() {
        let gh = gauss_hermite_nodes(2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((gh.nodes[0] + r).abs() < 1e-15);
        assert!((gh.nodes[1] - r).abs() < 1e-15);
        for w in &gh.weights {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fourth_moment_three_points() {
        let gh = gauss_hermite_nodes(3).unwrap();
        let m4: f64 = gh.nodes.iter().zip(&gh.weights).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.75 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for count in [5, 17, 64, 128, 200, 256] {
            let gh = gauss_hermite_nodes(count).unwrap();
            let s: f64 = gh.weights.iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-12, "count {count}: {s}");
        }
    }

    #[test]
    fn high_moments_match_double_factorial() {
        // int x^{2j} e^{-x^2} = Gamma(j + 1/2)
        let gh = gauss_hermite_nodes(40).unwrap();
        let mut gamma = PI.sqrt();
        for j in 0..20 {
            let m: f64 = gh.nodes.iter().zip(&gh.weights).map(|(x, w)| w * x.powi(2 * j)).sum();
            assert!(((m - gamma) / gamma).abs() < 1e-11, "moment {j}");
            gamma *= j as f64 + 0.5;
        }
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = gauss_legendre(10, -1.0, 2.0);
        let v = rule.integrate(|x| x.powi(19));
        let exact = (2f64.powi(20) - 1.0) / 20.0;
        assert!((v - exact).abs() < 1e-9 * exact);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 3.0).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_gaussian_is_spectral() {
        let rule = trapezoid(81, -8.0, 8.0);
        let v = rule.integrate(|x| (-x * x / 2.0).exp());
        assert!((v - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn table_round_trip_is_bit_exact() {
        let rule = gauss_hermite_nodes(33).unwrap();
        let mut buf = Vec::new();
        write_gauss_hermite_table(&mut buf, &rule).unwrap();
        let back = read_gauss_hermite_table(&buf[..], 33).unwrap();
        assert_eq!(back, rule);
        assert!(read_gauss_hermite_table(&buf[..], 34).is_err());
    }
}
