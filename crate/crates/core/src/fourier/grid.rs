//! Quadrature grids on the frequency space `Lambda = R^k \ {0}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Radial layout: an optional inner panel `[0, lambda_min]` followed by
/// `panels` geometrically growing Gauss-Legendre panels up to `lambda_max`.
/// For `k = 1` the radial rule is mirrored to `lambda < 0`; for `k = 2, 3`
/// it is combined with a rule on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGridSpec {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    #[serde(default = "yes")]
    pub inner_panel: bool,
    /// Angular resolution for `k >= 2` (ignored when `k = 1`).
    #[serde(default = "default_directions")]
    pub directions: usize,
}

fn yes() -> bool {
    true
}

fn default_directions() -> usize {
    8
}

impl Default for LambdaGridSpec {
    fn default() -> Self {
        Self { lambda_min: 0.05, lambda_max: 8.0, panels: 3, nodes_per_panel: 8, inner_panel: true, directions: 8 }
    }
}

impl LambdaGridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min) || !self.lambda_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need 0 < lambda_min < lambda_max, got {} and {}",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.panels == 0 || self.nodes_per_panel == 0 || self.directions == 0 {
            return Err(Error::InvalidParameter("grid counts must be positive".into()));
        }
        Ok(())
    }

    /// The grid for `f o delta_{1/s}` when `self` suits `f`.
    pub fn scaled(&self, s: f64) -> Self {
        let f = 1.0 / (s * s);
        Self { lambda_min: self.lambda_min * f, lambda_max: self.lambda_max * f, ..*self }
    }

    /// Same panels, twice the nodes per panel.
    pub fn refined(&self) -> Self {
        Self { nodes_per_panel: 2 * self.nodes_per_panel, ..*self }
    }

    /// Radial rule on `[0, lambda_max]` for `d rho`.
    fn radial(&self) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut push = |a: f64, b: f64| {
            let r = gauss_legendre(self.nodes_per_panel, a, b);
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        };
        if self.inner_panel {
            push(0.0, self.lambda_min);
        }
        let ratio = (self.lambda_max / self.lambda_min).powf(1.0 / self.panels as f64);
        let mut lo = self.lambda_min;
        for i in 0..self.panels {
            let hi = if i + 1 == self.panels { self.lambda_max } else { lo * ratio };
            push(lo, hi);
            lo = hi;
        }
        (nodes, weights)
    }

    /// Nodes and `d lambda` weights in `R^k`; the set is symmetric under
    /// `lambda -> -lambda`.
    pub fn build(&self, k: usize) -> Result<LambdaGrid> {
        self.validate()?;
        let (rho, w) = self.radial();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        match k {
            1 => {
                for (r, wi) in rho.iter().zip(&w).rev() {
                    points.push(vec![-r]);
                    weights.push(*wi);
                }
                for (r, wi) in rho.iter().zip(&w) {
                    points.push(vec![*r]);
                    weights.push(*wi);
                }
            }
            2 => {
                let m = 2 * self.directions;
                for (r, wi) in rho.iter().zip(&w) {
                    for j in 0..m {
                        let th = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                        points.push(vec![r * th.cos(), r * th.sin()]);
                        weights.push(wi * r * 2.0 * PI / m as f64);
                    }
                }
            }
            3 => {
                let zr = gauss_legendre(self.directions, -1.0, 1.0);
                let m = 2 * self.directions;
                for (r, wi) in rho.iter().zip(&w) {
                    for (z, wz) in zr.nodes.iter().zip(&zr.weights) {
                        let s = (1.0 - z * z).sqrt();
                        for j in 0..m {
                            let ph = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                            points.push(vec![r * s * ph.cos(), r * s * ph.sin(), r * z]);
                            weights.push(wi * r * r * wz * 2.0 * PI / m as f64);
                        }
                    }
                }
            }
            _ => {
                return Err(Error::InvalidParameter(format!("frequency grids support k <= 3, got {k}")));
            }
        }
        Ok(LambdaGrid { spec: *self, points, weights })
    }
}

/// Nodes in `R^k` with weights for Lebesgue measure `d lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    pub spec: LambdaGridSpec,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl LambdaGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_64_symmetric_nodes() {
        let g = LambdaGridSpec::default().build(1).unwrap();
        assert_eq!(g.len(), 64);
        for i in 0..32 {
            assert_eq!(g.points[i][0], -g.points[63 - i][0]);
            assert_eq!(g.weights[i], g.weights[63 - i]);
        }
        let total: f64 = g.weights.iter().sum();
        assert!((total - 16.0).abs() < 1e-12);
        // |lambda| e^{-lambda^2/2} integrates to 2 over R
        let s: f64 = g.points.iter().zip(&g.weights).map(|(l, w)| w * l[0].abs() * (-l[0] * l[0] / 2.0).exp()).sum();
        assert!((s - 2.0).abs() < 5e-5, "{s}");
    }

    #[test]
    fn higher_rank_grids_integrate_gaussians() {
        let spec = LambdaGridSpec { lambda_max: 10.0, nodes_per_panel: 16, ..Default::default() };
        for k in [2usize, 3] {
            let g = spec.build(k).unwrap();
            let s: f64 = g
                .points
                .iter()
                .zip(&g.weights)
                .map(|(l, w)| w * (-l.iter().map(|x| x * x).sum::<f64>()).exp())
                .sum();
            assert!((s - PI.powf(k as f64 / 2.0)).abs() < 1e-6, "k = {k}: {s}");
        }
        assert!(spec.build(4).is_err());
    }

    #[test]
    fn scaling_maps_nodes() {
        let base = LambdaGridSpec::default();
        let a = base.build(1).unwrap();
        let b = base.scaled(2.0).build(1).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert!((x[0] / 4.0 - y[0]).abs() < 1e-15);
        }
        assert!(LambdaGridSpec { lambda_min: 0.0, ..base }.validate().is_err());
    }
}
