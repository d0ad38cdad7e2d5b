//! Test functions on the group: the Gaussian family used throughout, plus
//! generic wrappers (closures, dilates, linear combinations).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{dilate, inverse, GroupDescriptor, GroupPoint, HaarBox};

/// Decay exponent used to size truncation boxes: the function is below
/// `exp(-DECAY_EXPONENT)` times its peak outside the box.
pub const DECAY_EXPONENT: f64 = 40.0;

/// A complex-valued function on the group with a declared decay box.
pub trait GroupFunction: Send + Sync {
    fn eval(&self, x: &GroupPoint) -> Complex64;

    /// A box outside of which the function is negligible. Its first-layer
    /// half-width bounds the Euclidean radius of the essential support, so it
    /// stays valid in every orthonormal chart.
    fn decay_box(&self) -> HaarBox;

    /// Length scale `s` such that the function behaves like a unit-scale
    /// profile composed with `delta_{1/s}`; frequency grids are mapped by
    /// `lambda -> lambda / s^2`.
    fn natural_scale(&self) -> f64 {
        1.0
    }
}

impl<T: GroupFunction + ?Sized> GroupFunction for Arc<T> {
    fn eval(&self, x: &GroupPoint) -> Complex64 {
        (**self).eval(x)
    }
    fn decay_box(&self) -> HaarBox {
        (**self).decay_box()
    }
    fn natural_scale(&self) -> f64 {
        (**self).natural_scale()
    }
}

impl<T: GroupFunction + ?Sized> GroupFunction for &T {
    fn eval(&self, x: &GroupPoint) -> Complex64 {
        (**self).eval(x)
    }
    fn decay_box(&self) -> HaarBox {
        (**self).decay_box()
    }
    fn natural_scale(&self) -> f64 {
        (**self).natural_scale()
    }
}

/// Parameters of a Gaussian family member, in the form accepted by configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub a: f64,
    pub b: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Central modulation `c` in `exp(i c.t)`.
    #[serde(default)]
    pub modulation: Vec<f64>,
    /// Left translation `y` in `f(y^{-1} x)`; first layer then centre.
    #[serde(default)]
    pub shift_v: Vec<f64>,
    #[serde(default)]
    pub shift_t: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

impl GaussianSpec {
    pub fn standard(a: f64, b: f64) -> Self {
        Self { a, b, amplitude: 1.0, modulation: vec![], shift_v: vec![], shift_t: vec![] }
    }
}

/// `x -> c * exp(-a |v_z|^2 - b |t_z|^2) * exp(i m.t_z)` with `z = y^{-1} x`.
#[derive(Debug, Clone)]
pub struct Gaussian {
    group: GroupDescriptor,
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    pub modulation: Vec<f64>,
    pub shift: GroupPoint,
}

impl Gaussian {
    pub fn new(group: &GroupDescriptor, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("Gaussian needs a, b > 0, got {a}, {b}")));
        }
        Ok(Self {
            group: group.clone(),
            a,
            b,
            amplitude: 1.0,
            modulation: vec![0.0; group.k()],
            shift: group.identity(),
        })
    }

    pub fn from_spec(group: &GroupDescriptor, spec: &GaussianSpec) -> Result<Self> {
        let mut g = Self::new(group, spec.a, spec.b)?.scaled(spec.amplitude);
        if !spec.modulation.is_empty() {
            g = g.modulated(&spec.modulation)?;
        }
        if !spec.shift_v.is_empty() || !spec.shift_t.is_empty() {
            let v = if spec.shift_v.is_empty() { vec![0.0; 2 * group.n()] } else { spec.shift_v.clone() };
            let t = if spec.shift_t.is_empty() { vec![0.0; group.k()] } else { spec.shift_t.clone() };
            if v.len() != 2 * group.n() {
                return Err(Error::Dimension(format!("shift_v needs {} entries", 2 * group.n())));
            }
            g = g.translated(&GroupPoint::from_parts(&v, &t))?;
        }
        Ok(g)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn modulated(mut self, c: &[f64]) -> Result<Self> {
        if c.len() != self.group.k() {
            return Err(Error::Dimension(format!("modulation needs {} entries", self.group.k())));
        }
        for (m, ci) in self.modulation.iter_mut().zip(c) {
            *m += ci;
        }
        Ok(self)
    }

    /// Left translate `x -> f(y^{-1} x)`.
    pub fn translated(mut self, y: &GroupPoint) -> Result<Self> {
        self.shift = self.group.multiply(y, &self.shift)?;
        Ok(self)
    }

    /// `f o delta_{1/r}`.
    pub fn dilated(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {r}")));
        }
        self.a /= r * r;
        self.b /= r.powi(4);
        for m in &mut self.modulation {
            *m /= r * r;
        }
        self.shift = dilate(&self.shift, r)?;
        Ok(self)
    }

    /// `||f||_p^p` in closed form; translation and modulation do not change it.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        let n = self.group.n() as f64;
        let k = self.group.k() as f64;
        self.amplitude.abs().powf(p) * (PI / (p * self.a)).powf(n) * (PI / (p * self.b)).powf(0.5 * k)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lp_norm_pow(p).powf(1.0 / p)
    }
}

impl GroupFunction for Gaussian {
    fn eval(&self, x: &GroupPoint) -> Complex64 {
        let z = if self.shift.v_norm_sq() == 0.0 && self.shift.t_norm_sq() == 0.0 {
            x.clone()
        } else {
            self.group.multiply(&inverse(&self.shift), x).expect("dimensions checked at construction")
        };
        let phase: f64 = self.modulation.iter().zip(&z.t).map(|(m, t)| m * t).sum();
        let mag = self.amplitude * (-self.a * z.v_norm_sq() - self.b * z.t_norm_sq()).exp();
        Complex64::from_polar(mag, phase)
    }

    fn decay_box(&self) -> HaarBox {
        let rv = (DECAY_EXPONENT / self.a).sqrt();
        let rt = (DECAY_EXPONENT / self.b).sqrt();
        let yv = self.shift.v_norm_sq().sqrt();
        let yt = self.shift.t_norm_sq().sqrt();
        // |[y, v]| <= |y| |v| for H-type structure maps
        HaarBox { v_half: yv + rv, t_half: yt + rt + 0.5 * yv * (yv + rv) }
    }

    fn natural_scale(&self) -> f64 {
        1.0 / (2.0 * self.a).sqrt()
    }
}

type Callback = dyn Fn(&GroupPoint) -> Complex64 + Send + Sync;

/// A closure with an explicit decay box.
#[derive(Clone)]
pub struct FnFunction {
    f: Arc<Callback>,
    bx: HaarBox,
    scale: f64,
}

impl FnFunction {
    pub fn new<F>(f: F, bx: HaarBox) -> Self
    where
        F: Fn(&GroupPoint) -> Complex64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), bx, scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// The zero function on the given box.
    pub fn zero(bx: HaarBox) -> Self {
        Self::new(|_| Complex64::new(0.0, 0.0), bx)
    }

    /// `x -> conj(f(x^{-1}))`.
    pub fn adjoint_of<F: GroupFunction + Clone + 'static>(f: F) -> Self {
        let bx = f.decay_box();
        let scale = f.natural_scale();
        Self::new(move |x| f.eval(&inverse(x)).conj(), bx).with_scale(scale)
    }
}

impl GroupFunction for FnFunction {
    fn eval(&self, x: &GroupPoint) -> Complex64 {
        (self.f)(x)
    }
    fn decay_box(&self) -> HaarBox {
        self.bx
    }
    fn natural_scale(&self) -> f64 {
        self.scale
    }
}

/// `x -> f(delta_r x)`, i.e. the function usually written `delta_r f`.
#[derive(Clone)]
pub struct Dilated<F> {
    pub inner: F,
    pub r: f64,
}

impl<F: GroupFunction> Dilated<F> {
    pub fn new(inner: F, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {r}")));
        }
        Ok(Self { inner, r })
    }
}

impl<F: GroupFunction> GroupFunction for Dilated<F> {
    fn eval(&self, x: &GroupPoint) -> Complex64 {
        self.inner.eval(&dilate(x, self.r).expect("r > 0 checked"))
    }
    fn decay_box(&self) -> HaarBox {
        self.inner.decay_box().scaled(1.0 / self.r)
    }
    fn natural_scale(&self) -> f64 {
        self.inner.natural_scale() / self.r
    }
}

/// `sum_i c_i f_i` on the union of the member boxes.
#[derive(Clone)]
pub struct Combination {
    pub terms: Vec<(Complex64, Arc<dyn GroupFunction>)>,
}

impl GroupFunction for Combination {
    fn eval(&self, x: &GroupPoint) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.eval(x)).sum()
    }
    fn decay_box(&self) -> HaarBox {
        self.terms.iter().fold(HaarBox { v_half: 0.0, t_half: 0.0 }, |acc, (_, f)| {
            let b = f.decay_box();
            HaarBox { v_half: acc.v_half.max(b.v_half), t_half: acc.t_half.max(b.t_half) }
        })
    }
    fn natural_scale(&self) -> f64 {
        self.terms.first().map(|(_, f)| f.natural_scale()).unwrap_or(1.0)
    }
}
