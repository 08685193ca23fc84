//! Quasi-regular representation in the Fourier picture, restricted to one orbit.
//!
//! `(Û(b,h)f)(k) = |det h|^{1/2} e^{ik·b} f(kh)` with `k` a row vector.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::group::{GroupElement, GroupModel, LieAlgebraElement};
use crate::linalg::{self, Mat, Vector};
use crate::orbit::{self, OrbitDescriptor};
use crate::quadrature::{self, QuadratureSpec, Rule};
use crate::{Error, Result};

/// Largest `x_q`-nodes × `k`-nodes product accepted by the group integrals.
pub const GROUP_INTEGRAL_BUDGET: f64 = 4e9;

/// Support radius of a Gaussian in units of its width; `|f|²` has relative tail below 1e-10 beyond it.
pub const GAUSSIAN_RADIUS: f64 = 7.0;

pub type EvalFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// Axis-aligned box in `k`-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SupportBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::InvalidParameter("support box must be finite and non-empty".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn around(center: &[f64], half: f64) -> Self {
        Self { lo: center.iter().map(|c| c - half).collect(), hi: center.iter().map(|c| c + half).collect() }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, k: &[f64]) -> bool {
        k.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| v >= a && v <= b)
    }

    pub fn intersect(&self, other: &SupportBox) -> Option<SupportBox> {
        let lo: Vec<f64> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        lo.iter().zip(&hi).all(|(a, b)| a < b).then_some(SupportBox { lo, hi })
    }

    pub fn union(&self, other: &SupportBox) -> SupportBox {
        SupportBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    /// Bounding box of `{k·m : k ∈ self}`.
    pub fn transformed(&self, m: &Mat) -> SupportBox {
        let n = self.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for corner in 0..(1usize << n) {
            let k =
                Vector::from_iterator(n, (0..n).map(|d| if corner >> d & 1 == 1 { self.hi[d] } else { self.lo[d] }));
            let img = m.tr_mul(&k);
            for d in 0..n {
                lo[d] = lo[d].min(img[d]);
                hi[d] = hi[d].max(img[d]);
            }
        }
        SupportBox { lo, hi }
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

/// Ellipsoid `{c + A·u : |u| ≤ 1}` containing the numerical support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: Vector,
    pub axes: Mat,
}

impl Ellipsoid {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        let n = center.len();
        Self { center: Vector::from_column_slice(center), axes: Mat::identity(n, n) * radius }
    }

    /// Image under `k ↦ k·m`.
    pub fn transformed(&self, m: &Mat) -> Self {
        Self { center: m.tr_mul(&self.center), axes: m.transpose() * &self.axes }
    }

    pub fn bounding_box(&self) -> SupportBox {
        let n = self.center.len();
        let half: Vec<f64> = (0..n).map(|i| self.axes.row(i).norm()).collect();
        SupportBox {
            lo: (0..n).map(|i| self.center[i] - half[i]).collect(),
            hi: (0..n).map(|i| self.center[i] + half[i]).collect(),
        }
    }
}

/// Complex samples on a regular grid, evaluated by multilinear interpolation and zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub counts: Vec<usize>,
    /// Row-major values, last axis fastest.
    pub values: Vec<Complex64>,
}

impl SampledGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        SupportBox::new(lo.clone(), hi.clone())?;
        if counts.len() != lo.len() || counts.iter().any(|&c| c < 2) {
            return Err(Error::Format("sampled grid needs at least two samples per axis".into()));
        }
        if counts.iter().product::<usize>() != values.len() {
            return Err(Error::Format(format!(
                "sampled grid expects {} values, got {}",
                counts.iter().product::<usize>(),
                values.len()
            )));
        }
        Ok(Self { lo, hi, counts, values })
    }

    /// Samples `f` on the grid.
    pub fn sample<F: Fn(&[f64]) -> Complex64>(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>, f: F) -> Result<Self> {
        let total: usize = counts.iter().product();
        let n = counts.len();
        let mut values = Vec::with_capacity(total);
        let mut k = vec![0.0; n];
        for idx in 0..total {
            let mut rest = idx;
            for d in (0..n).rev() {
                let i = rest % counts[d];
                rest /= counts[d];
                k[d] = lo[d] + (hi[d] - lo[d]) * i as f64 / (counts[d] - 1) as f64;
            }
            values.push(f(&k));
        }
        Self::new(lo, hi, counts, values)
    }

    pub fn eval(&self, k: &[f64]) -> Complex64 {
        let n = self.counts.len();
        let mut base = [0usize; 8];
        let mut frac = [0.0f64; 8];
        assert!(n <= 8, "sampled grids support at most 8 dimensions");
        for d in 0..n {
            let t = (k[d] - self.lo[d]) / (self.hi[d] - self.lo[d]) * (self.counts[d] - 1) as f64;
            if !(t >= 0.0 && t <= (self.counts[d] - 1) as f64) {
                return Complex64::new(0.0, 0.0);
            }
            let i = (t.floor() as usize).min(self.counts[d] - 2);
            base[d] = i;
            frac[d] = t - i as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = 0;
            for d in 0..n {
                let up = corner >> (n - 1 - d) & 1;
                w *= if up == 1 { frac[d] } else { 1.0 - frac[d] };
                idx = idx * self.counts[d] + base[d] + up;
            }
            if w != 0.0 {
                acc += self.values[idx] * w;
            }
        }
        acc
    }
}

/// How an [`OrbitFunction`] computes its values.
pub enum Kernel {
    Zero,
    /// `amplitude·(2πw²)^{−n/4}·e^{−|k−c|²/(4w²)}·e^{i slope·k}`; unit norm when `|amplitude| = 1`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: Complex64,
        slope: Vec<f64>,
    },
    /// `amplitude·exp(1 − 1/(1 − |k−c|²/r²))` inside the ball, zero outside.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: Complex64,
    },
    Sampled(SampledGrid),
    /// `Û(b,h)` applied to `inner`.
    Group {
        b: Vector,
        h: Mat,
        jac: f64,
        inner: Arc<Kernel>,
    },
    /// `Û(e^{−X})` applied to `inner`: `jac·e^{−ik·shift}·inner(k·h)`, `h = e^{−X_q}`, `shift = F(−X_q)x_p`.
    Exp {
        shift: Vector,
        h: Mat,
        jac: f64,
        inner: Arc<Kernel>,
    },
    /// `(2π)^{±n/2}·c(k)^{±1/2}·inner(k)`.
    DufloMoore {
        power: i32,
        inner: Arc<Kernel>,
    },
    Scaled {
        factor: Complex64,
        inner: Arc<Kernel>,
    },
    Sum(Arc<Kernel>, Arc<Kernel>),
    Custom(Arc<EvalFn>),
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Zero => write!(f, "Zero"),
            Kernel::Gaussian { center, width, .. } => write!(f, "Gaussian({center:?}, {width})"),
            Kernel::Bump { center, radius, .. } => write!(f, "Bump({center:?}, {radius})"),
            Kernel::Sampled(g) => write!(f, "Sampled({:?})", g.counts),
            Kernel::Group { inner, .. } => write!(f, "Group({inner:?})"),
            Kernel::Exp { inner, .. } => write!(f, "Exp({inner:?})"),
            Kernel::DufloMoore { power, inner } => write!(f, "DufloMoore({power}, {inner:?})"),
            Kernel::Scaled { factor, inner } => write!(f, "Scaled({factor}, {inner:?})"),
            Kernel::Sum(a, b) => write!(f, "Sum({a:?}, {b:?})"),
            Kernel::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// `out = kᵀ·m`.
fn row_times(k: &[f64], m: &Mat, out: &mut [f64]) {
    let n = k.len();
    for (j, o) in out.iter_mut().enumerate().take(n) {
        let mut s = 0.0;
        for (i, ki) in k.iter().enumerate() {
            s += ki * m[(i, j)];
        }
        *o = s;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Kernel {
    fn eval(&self, k: &[f64], model: &GroupModel) -> Complex64 {
        let n = k.len();
        match self {
            Kernel::Zero => Complex64::new(0.0, 0.0),
            Kernel::Gaussian { center, width, amplitude, slope } => {
                let r2: f64 = k.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                let norm = (2.0 * PI * width * width).powf(-(n as f64) / 4.0);
                amplitude * norm * (-r2 / (4.0 * width * width)).exp() * Complex64::from_polar(1.0, dot(slope, k))
            }
            Kernel::Bump { center, radius, amplitude } => {
                let r2: f64 = k.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() / (radius * radius);
                if r2 >= 1.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - r2)).exp()
                }
            }
            Kernel::Sampled(g) => g.eval(k),
            Kernel::Group { b, h, jac, inner } => {
                let mut kh = [0.0; 8];
                row_times(k, h, &mut kh);
                let v = inner.eval(&kh[..n], model);
                if v == Complex64::new(0.0, 0.0) {
                    return v;
                }
                v * Complex64::from_polar(*jac, dot(k, b.as_slice()))
            }
            Kernel::Exp { shift, h, jac, inner } => {
                let mut kh = [0.0; 8];
                row_times(k, h, &mut kh);
                let v = inner.eval(&kh[..n], model);
                if v == Complex64::new(0.0, 0.0) {
                    return v;
                }
                v * Complex64::from_polar(*jac, -dot(k, shift.as_slice()))
            }
            Kernel::DufloMoore { power, inner } => {
                let v = inner.eval(k, model);
                if v == Complex64::new(0.0, 0.0) {
                    return v;
                }
                let d = orbit::delta_slice(k, model).abs();
                let s = (2.0 * PI).powf(0.5 * n as f64);
                if *power > 0 {
                    v * s / d.sqrt()
                } else {
                    v * d.sqrt() / s
                }
            }
            Kernel::Scaled { factor, inner } => factor * inner.eval(k, model),
            Kernel::Sum(a, b) => a.eval(k, model) + b.eval(k, model),
            Kernel::Custom(f) => f(k),
        }
    }
}

/// A square-integrable function on one open orbit in `k`-space.
#[derive(Clone)]
pub struct OrbitFunction {
    pub orbit: OrbitDescriptor,
    pub model: Arc<GroupModel>,
    pub kernel: Arc<Kernel>,
    pub support_hint: SupportBox,
    /// Tighter support description kept through linear transforms when available.
    pub support_ellipsoid: Option<Ellipsoid>,
    norm_cache: Arc<OnceLock<f64>>,
    /// Short human-readable description of how the function was built.
    pub id: String,
}

impl fmt::Debug for OrbitFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrbitFunction")
            .field("orbit", &self.orbit.label)
            .field("id", &self.id)
            .field("support_hint", &self.support_hint)
            .finish()
    }
}

fn orbit_by_label(model: &GroupModel, label: usize) -> Result<OrbitDescriptor> {
    model
        .orbits
        .get(label)
        .cloned()
        .ok_or_else(|| Error::InvalidParameter(format!("group '{}' has no orbit {label}", model.name)))
}

impl OrbitFunction {
    pub fn new(
        model: Arc<GroupModel>,
        orbit: usize,
        kernel: Kernel,
        support_hint: SupportBox,
        id: &str,
    ) -> Result<Self> {
        let orbit = orbit_by_label(&model, orbit)?;
        if support_hint.dim() != model.n {
            return Err(Error::InvalidParameter("support box dimension does not match the group".into()));
        }
        if model.n > 8 {
            return Err(Error::InvalidParameter("orbit functions support at most 8 dimensions".into()));
        }
        Ok(Self {
            orbit,
            model,
            kernel: Arc::new(kernel),
            support_hint,
            support_ellipsoid: None,
            norm_cache: Arc::new(OnceLock::new()),
            id: id.to_string(),
        })
    }

    fn with_ellipsoid(mut self, e: Ellipsoid) -> Self {
        self.support_hint = e.bounding_box();
        self.support_ellipsoid = Some(e);
        self
    }

    fn derived(&self, kernel: Kernel, support_hint: SupportBox, id: String) -> Self {
        Self {
            orbit: self.orbit.clone(),
            model: self.model.clone(),
            kernel: Arc::new(kernel),
            support_hint,
            support_ellipsoid: self.support_ellipsoid.clone(),
            norm_cache: Arc::new(OnceLock::new()),
            id,
        }
    }

    /// `derived` for a kernel that sees its argument through `k ↦ k·m`, `m⁻¹ = m_inv`.
    fn derived_linear(&self, kernel: Kernel, m_inv: &Mat, id: String) -> Self {
        let mut out = self.derived(kernel, self.support_hint.transformed(m_inv), id);
        if let Some(e) = &self.support_ellipsoid {
            let e = e.transformed(m_inv);
            if let Some(b) = out.support_hint.intersect(&e.bounding_box()) {
                out.support_hint = b;
            }
            out.support_ellipsoid = Some(e);
        }
        out
    }

    pub fn zero(model: Arc<GroupModel>, orbit: usize) -> Result<Self> {
        let rep = orbit_by_label(&model, orbit)?.representative;
        Self::new(model, orbit, Kernel::Zero, SupportBox::around(&rep, 1.0), "zero")
    }

    /// Unit-norm Gaussian centered at `center`, which must lie in `orbit`.
    pub fn gaussian(model: Arc<GroupModel>, orbit: usize, center: &[f64], width: f64) -> Result<Self> {
        Self::gaussian_with(model, orbit, center, width, Complex64::new(1.0, 0.0), &vec![0.0; center.len()])
    }

    pub fn gaussian_with(
        model: Arc<GroupModel>,
        orbit: usize,
        center: &[f64],
        width: f64,
        amplitude: Complex64,
        slope: &[f64],
    ) -> Result<Self> {
        if center.len() != model.n || slope.len() != model.n || width.is_nan() || width <= 0.0 {
            return Err(Error::InvalidParameter("gaussian needs an n-dimensional center and a positive width".into()));
        }
        if orbit::classify_label(center, &model) != Some(orbit) {
            return Err(Error::InvalidParameter(format!("gaussian center {center:?} is not in orbit {orbit}")));
        }
        let kernel = Kernel::Gaussian { center: center.to_vec(), width, amplitude, slope: slope.to_vec() };
        let hint = SupportBox::around(center, GAUSSIAN_RADIUS * width);
        Ok(Self::new(model, orbit, kernel, hint, &format!("gaussian:center={center:?}:width={width}"))?
            .with_ellipsoid(Ellipsoid::ball(center, GAUSSIAN_RADIUS * width)))
    }

    pub fn bump(model: Arc<GroupModel>, orbit: usize, center: &[f64], radius: f64) -> Result<Self> {
        if center.len() != model.n || radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidParameter("bump needs an n-dimensional center and a positive radius".into()));
        }
        let kernel = Kernel::Bump { center: center.to_vec(), radius, amplitude: Complex64::new(1.0, 0.0) };
        let hint = SupportBox::around(center, radius);
        Ok(Self::new(model, orbit, kernel, hint, &format!("bump:center={center:?}:radius={radius}"))?
            .with_ellipsoid(Ellipsoid::ball(center, radius)))
    }

    pub fn sampled(model: Arc<GroupModel>, orbit: usize, grid: SampledGrid, id: &str) -> Result<Self> {
        if grid.lo.len() != model.n {
            return Err(Error::Format("sampled grid dimension does not match the group".into()));
        }
        let hint = SupportBox::new(grid.lo.clone(), grid.hi.clone())?;
        Self::new(model, orbit, Kernel::Sampled(grid), hint, id)
    }

    pub fn custom<F>(model: Arc<GroupModel>, orbit: usize, support: SupportBox, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(model, orbit, Kernel::Custom(Arc::new(f)), support, "custom")
    }

    pub fn dim(&self) -> usize {
        self.model.n
    }

    pub fn is_zero(&self) -> bool {
        matches!(*self.kernel, Kernel::Zero)
    }

    /// Value at `k`; zero off the orbit and on its boundary.
    pub fn evaluate(&self, k: &[f64]) -> Complex64 {
        if self.is_zero() || orbit::classify_label(k, &self.model) != Some(self.orbit.label) {
            return Complex64::new(0.0, 0.0);
        }
        self.kernel.eval(k, &self.model)
    }

    /// `a·f`.
    pub fn scaled(&self, a: Complex64) -> Self {
        let k = Kernel::Scaled { factor: a, inner: self.kernel.clone() };
        self.derived(k, self.support_hint.clone(), format!("{a}*({})", self.id))
    }

    /// `f + g`; both must live on the same orbit.
    pub fn add(&self, other: &OrbitFunction) -> Result<Self> {
        if other.orbit.label != self.orbit.label || other.model.name != self.model.name {
            return Err(Error::InvalidParameter("summands live on different orbits".into()));
        }
        let k = Kernel::Sum(self.kernel.clone(), other.kernel.clone());
        let mut out =
            self.derived(k, self.support_hint.union(&other.support_hint), format!("({})+({})", self.id, other.id));
        out.support_ellipsoid = None;
        Ok(out)
    }

    /// `‖f‖₂` with the default rule on the support box, cached.
    pub fn norm(&self) -> f64 {
        *self.norm_cache.get_or_init(|| self.norm_with(default_k_points(self.dim())))
    }

    pub fn norm_with(&self, points: usize) -> f64 {
        integrate_box(&self.support_hint, points, |k| self.evaluate(k).norm_sqr()).sqrt()
    }
}

/// Gauss–Legendre points per `k`-axis used by norms and inner products.
pub fn default_k_points(n: usize) -> usize {
    match n {
        0..=2 => 160,
        3 => 64,
        _ => 28,
    }
}

fn box_rule(b: &SupportBox, points: usize) -> quadrature::TensorRule {
    QuadratureSpec {
        rule: Rule::GaussLegendre,
        points_per_dim: points,
        lower: b.lo.clone(),
        upper: b.hi.clone(),
        rel_tol: 1.0,
    }
    .tensor()
}

/// `∫_box f` by tensor Gauss–Legendre, parallel over the first axis with a fixed reduction order.
pub fn integrate_box<F: Fn(&[f64]) -> f64 + Sync>(b: &SupportBox, points: usize, f: F) -> f64 {
    let rule = box_rule(b, points);
    let block = rule.len() / rule.axes[0].0.len();
    let partial: Vec<f64> = (0..rule.axes[0].0.len())
        .into_par_iter()
        .map(|i| {
            let mut x = vec![0.0; rule.dim()];
            let mut s = 0.0;
            for j in i * block..(i + 1) * block {
                let w = rule.node(j, &mut x);
                s += w * f(&x);
            }
            s
        })
        .collect();
    partial.iter().sum()
}

fn integrate_box_complex<F: Fn(&[f64]) -> Complex64 + Sync>(b: &SupportBox, points: usize, f: F) -> Complex64 {
    let re = integrate_box(b, points, |k| f(k).re);
    let im = integrate_box(b, points, |k| f(k).im);
    Complex64::new(re, im)
}

/// `⟨f|g⟩ = ∫ conj(f)·g dk`.
pub fn inner_product(f: &OrbitFunction, g: &OrbitFunction) -> Complex64 {
    inner_product_with(f, g, default_k_points(f.dim()))
}

pub fn inner_product_with(f: &OrbitFunction, g: &OrbitFunction, points: usize) -> Complex64 {
    if f.orbit.label != g.orbit.label {
        return Complex64::new(0.0, 0.0);
    }
    match f.support_hint.intersect(&g.support_hint) {
        None => Complex64::new(0.0, 0.0),
        Some(b) => integrate_box_complex(&b, points, |k| f.evaluate(k).conj() * g.evaluate(k)),
    }
}

/// `Û(g)f`.
pub fn rep_apply(g: &GroupElement, f: &OrbitFunction) -> Result<OrbitFunction> {
    let d = linalg::det(&g.h);
    let h_inv = linalg::inverse_guarded(&g.h, "rep_apply")?;
    let kernel = Kernel::Group { b: g.b.clone(), h: g.h.clone(), jac: d.abs().sqrt(), inner: f.kernel.clone() };
    Ok(f.derived_linear(kernel, &h_inv, format!("U(g)({})", f.id)))
}

/// `Û(e^{−X})f`.
pub fn rep_apply_exp(x: &LieAlgebraElement, f: &OrbitFunction) -> Result<OrbitFunction> {
    let model = &f.model;
    if !model.in_exp_domain(x.x_q.as_slice()) {
        return Err(Error::Domain(format!("x_q = {:?}", x.x_q.as_slice())));
    }
    let xq = model.x_q_matrix(x.x_q.as_slice());
    let h = linalg::matrix_exp(&-&xq)?;
    let h_inv = linalg::matrix_exp(&xq)?;
    let shift = linalg::f_plus(&-&xq, &model.series)? * &x.x_p;
    let jac = linalg::det(&h).abs().sqrt();
    let kernel = Kernel::Exp { shift, h, jac, inner: f.kernel.clone() };
    Ok(f.derived_linear(kernel, &h_inv, format!("U(exp(-X))({})", f.id)))
}

/// `C^{±1}f = (2π)^{±n/2}·c^{±1/2}·f`.
pub fn duflo_moore_apply(f: &OrbitFunction, power: i32) -> Result<OrbitFunction> {
    if power != 1 && power != -1 {
        return Err(Error::InvalidParameter(format!("Duflo–Moore power must be ±1, got {power}")));
    }
    let kernel = Kernel::DufloMoore { power, inner: f.kernel.clone() };
    Ok(f.derived(kernel, f.support_hint.clone(), format!("C^{power}({})", f.id)))
}

/// Group-integral value together with the prediction from the orthogonality relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupIntegral {
    pub integral: Complex64,
    pub predicted: Complex64,
}

impl GroupIntegral {
    pub fn rel_err(&self) -> f64 {
        (self.integral - self.predicted).norm() / self.predicted.norm().max(f64::MIN_POSITIVE)
    }
}

/// `∫_G ⟨Û(g)η₁|φ₁⟩·conj⟨Û(g)η₂|φ₂⟩ dμ_G(g)`.
///
/// With `dμ_G(b,h) = |det h|⁻¹ db dμ_H(h)` the `b`-integral is done by Plancherel, leaving
/// `(2π)ⁿ ∫ m_H(x_q) ∫ conj(η₁(kh))·η₂(kh)·φ₁(k)·conj(φ₂(k)) dk dx_q` with `h = e^{X_q}`,
/// integrated over the box of `quad`.
pub fn orthogonality_integral(
    eta1: &OrbitFunction,
    eta2: &OrbitFunction,
    phi1: &OrbitFunction,
    phi2: &OrbitFunction,
    quad: &QuadratureSpec,
) -> Result<GroupIntegral> {
    let model = eta1.model.clone();
    let n = model.n;
    let pred = {
        let c1 = duflo_moore_apply(eta1, 1)?;
        let c2 = duflo_moore_apply(eta2, 1)?;
        inner_product(&c1, &c2) * inner_product(phi2, phi1)
    };
    let k_box = match phi1.support_hint.intersect(&phi2.support_hint) {
        Some(b) if phi1.orbit.label == phi2.orbit.label => b,
        _ => return Ok(GroupIntegral { integral: Complex64::new(0.0, 0.0), predicted: pred }),
    };
    let k_points = default_k_points(n).min(96);
    let rule = quad.tensor();
    let total = rule.len() as f64 * (k_points as f64).powi(n as i32);
    if total > GROUP_INTEGRAL_BUDGET {
        return Err(Error::QuadratureBudgetExceeded(format!("{total:e} integrand evaluations")));
    }
    let k_rule = box_rule(&k_box, k_points);
    let k_nodes: Vec<(Vec<f64>, f64, Complex64)> = (0..k_rule.len())
        .filter_map(|i| {
            let mut k = vec![0.0; n];
            let w = k_rule.node(i, &mut k);
            let v = phi1.evaluate(&k) * phi2.evaluate(&k).conj();
            (v != Complex64::new(0.0, 0.0)).then_some((k, w, v * w))
        })
        .collect();
    let parts: Vec<Result<Complex64>> = (0..rule.len())
        .into_par_iter()
        .map(|i| {
            let mut x = vec![0.0; n];
            let w = rule.node(i, &mut x);
            if !model.in_exp_domain(&x) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let m_h = model.haar_density_h(&x)?;
            let h = linalg::matrix_exp(&model.x_q_matrix(&x))?;
            let mut kh = vec![0.0; n];
            let mut s = Complex64::new(0.0, 0.0);
            for (k, _, v) in &k_nodes {
                row_times(k, &h, &mut kh);
                s += eta1.evaluate(&kh).conj() * eta2.evaluate(&kh) * v;
            }
            Ok(s * w * m_h)
        })
        .collect();
    let mut integral = Complex64::new(0.0, 0.0);
    for p in parts {
        integral += p?;
    }
    Ok(GroupIntegral { integral: integral * (2.0 * PI).powi(n as i32), predicted: pred })
}

/// `∫_G |⟨Û(g)η|η⟩|² dμ_G` against `(2π)ⁿ‖c^{1/2}η‖²‖η‖²`.
pub fn admissibility_integral(eta: &OrbitFunction, quad: &QuadratureSpec) -> Result<GroupIntegral> {
    if eta.is_zero() {
        return Ok(GroupIntegral { integral: Complex64::new(0.0, 0.0), predicted: Complex64::new(0.0, 0.0) });
    }
    orthogonality_integral(eta, eta, eta, eta, quad)
}
