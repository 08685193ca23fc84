//! Tensor-product quadrature on boxes in `x_q`-coordinates.

use serde::{Deserialize, Serialize};

use crate::group::{ExpDomain, GroupModel};
use crate::{Error, Result};

pub const MIN_POINTS: usize = 16;
/// Half-width of the default integration box.
pub const DEFAULT_HALF_WIDTH: f64 = 2.0;
/// Maximum number of box doublings during tail control.
pub const MAX_DOUBLINGS: usize = 3;
/// Upper bound on tensor nodes in a single rule.
pub const NODE_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Trapezoid,
    GaussLegendre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub points_per_dim: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rel_tol: f64,
}

/// Default points per dimension for an `n`-dimensional integral.
pub fn default_points(n: usize) -> usize {
    match n {
        0..=2 => 128,
        3 => 48,
        _ => 20,
    }
}

impl QuadratureSpec {
    pub fn new(rule: Rule, points_per_dim: usize, lower: Vec<f64>, upper: Vec<f64>, rel_tol: f64) -> Result<Self> {
        let spec = Self { rule, points_per_dim, lower, upper, rel_tol };
        spec.validate()?;
        Ok(spec)
    }

    /// Gauss–Legendre on `[−L, L]ⁿ` clipped to the model's exponential domain.
    pub fn for_model(model: &GroupModel, points_per_dim: usize, half_width: f64, rel_tol: f64) -> Result<Self> {
        let n = model.n;
        Self::new(Rule::GaussLegendre, points_per_dim, vec![-half_width; n], vec![half_width; n], rel_tol)
            .map(|s| s.clipped(&model.exp_domain))
    }

    pub fn default_for(model: &GroupModel) -> Self {
        Self::for_model(model, default_points(model.n), DEFAULT_HALF_WIDTH, 1e-3).expect("default spec is valid")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_dim < MIN_POINTS {
            return Err(Error::InvalidParameter(format!("points_per_dim must be at least {MIN_POINTS}")));
        }
        if self.lower.len() != self.upper.len() || self.lower.is_empty() {
            return Err(Error::InvalidParameter("quadrature box bounds have mismatched lengths".into()));
        }
        if self.lower.iter().zip(&self.upper).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::InvalidParameter("quadrature box must be finite and non-empty".into()));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidParameter("rel_tol must be positive".into()));
        }
        let nodes = (self.points_per_dim as f64).powi(self.dim() as i32);
        if nodes > NODE_BUDGET as f64 {
            return Err(Error::QuadratureBudgetExceeded(format!("{nodes} nodes exceed the budget of {NODE_BUDGET}")));
        }
        Ok(())
    }

    /// Intersects the box with the coordinate ranges of `domain`.
    pub fn clipped(mut self, domain: &ExpDomain) -> Self {
        for i in 0..self.dim() {
            let (lo, hi) = domain.coordinate_range(i);
            self.lower[i] = self.lower[i].max(lo);
            self.upper[i] = self.upper[i].min(hi);
        }
        self
    }

    /// Same rule on a box scaled by `factor`, clipped to `domain`.
    pub fn scaled(&self, factor: f64, domain: &ExpDomain) -> Self {
        let mut s = self.clone();
        for i in 0..self.dim() {
            let mid = 0.5 * (self.lower[i] + self.upper[i]);
            let half = 0.5 * (self.upper[i] - self.lower[i]) * factor;
            s.lower[i] = mid - half;
            s.upper[i] = mid + half;
        }
        s.clipped(domain)
    }

    /// True for faces of the box that were not cut by the exponential domain.
    pub fn free_faces(&self, domain: &ExpDomain) -> Vec<(bool, bool)> {
        (0..self.dim())
            .map(|i| {
                let (lo, hi) = domain.coordinate_range(i);
                (self.lower[i] > lo, self.upper[i] < hi)
            })
            .collect()
    }

    pub fn axis(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let (x, w) = match self.rule {
            Rule::GaussLegendre => gauss_legendre(self.points_per_dim),
            Rule::Trapezoid => trapezoid(self.points_per_dim),
        };
        let (a, b) = (self.lower[i], self.upper[i]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        (x.iter().map(|t| mid + half * t).collect(), w.iter().map(|v| v * half).collect())
    }

    pub fn tensor(&self) -> TensorRule {
        TensorRule { axes: (0..self.dim()).map(|i| self.axis(i)).collect() }
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Closed trapezoid rule on `[−1, 1]` with `n` equispaced nodes.
pub fn trapezoid(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 / (n - 1) as f64;
    let x = (0..n).map(|i| -1.0 + i as f64 * h).collect();
    let w = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
    (x, w)
}

/// Per-axis nodes and weights of a tensor-product rule.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub axes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl TensorRule {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.0.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of flat node `idx`; the last axis varies fastest.
    pub fn index(&self, mut idx: usize, out: &mut [usize]) {
        for d in (0..self.dim()).rev() {
            let m = self.axes[d].0.len();
            out[d] = idx % m;
            idx /= m;
        }
    }

    /// Node coordinates and product weight of flat node `idx`.
    pub fn node(&self, idx: usize, x: &mut [f64]) -> f64 {
        let mut w = 1.0;
        let mut rest = idx;
        for d in (0..self.dim()).rev() {
            let (xs, ws) = &self.axes[d];
            let i = rest % xs.len();
            rest /= xs.len();
            x[d] = xs[i];
            w *= ws[i];
        }
        w
    }

    /// `Σ w_i f(x_i)` in fixed node order.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        let mut x = vec![0.0; self.dim()];
        let mut s = 0.0;
        for i in 0..self.len() {
            let w = self.node(i, &mut x);
            s += w * f(&x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_small_orders() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_relative_eq!(x[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_eq!(x[1], 0.0);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [16, 48, 128] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            for k in (0..2 * n).step_by(7) {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(k as i32)).sum();
                assert!((got - exact).abs() < 1e-13, "n={n} k={k}: {got} vs {exact}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn gaussian_integral_in_two_dims() {
        let spec = QuadratureSpec::new(Rule::GaussLegendre, 64, vec![-8.0; 2], vec![8.0; 2], 1e-6).unwrap();
        let v = spec.tensor().integrate(|x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        assert_relative_eq!(v, std::f64::consts::PI, epsilon = 1e-12);
        let t = QuadratureSpec { rule: Rule::Trapezoid, ..spec };
        let v = t.tensor().integrate(|x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        assert_relative_eq!(v, std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(QuadratureSpec::new(Rule::GaussLegendre, 8, vec![-1.0], vec![1.0], 1e-3).is_err());
        assert!(QuadratureSpec::new(Rule::GaussLegendre, 16, vec![1.0], vec![-1.0], 1e-3).is_err());
        assert!(QuadratureSpec::new(Rule::GaussLegendre, 16, vec![-1.0], vec![1.0], 0.0).is_err());
        let err = QuadratureSpec::new(Rule::GaussLegendre, 4096, vec![-1.0; 3], vec![1.0; 3], 1e-3).unwrap_err();
        assert_eq!(err.kind(), "QuadratureBudgetExceeded");
    }

    #[test]
    fn clipping_and_scaling() {
        let sim2 = crate::catalog::make_sim2();
        let spec = QuadratureSpec::for_model(&sim2.model, 32, 8.0, 1e-3).unwrap();
        assert_eq!(spec.lower, vec![-8.0, -std::f64::consts::PI]);
        assert_eq!(spec.upper, vec![8.0, std::f64::consts::PI]);
        assert_eq!(spec.free_faces(&sim2.model.exp_domain), vec![(true, true), (false, false)]);
        let s = QuadratureSpec::for_model(&sim2.model, 32, 1.0, 1e-3).unwrap().scaled(2.0, &sim2.model.exp_domain);
        assert_eq!(s.upper, vec![2.0, 2.0]);
    }

    #[test]
    fn tensor_index_order() {
        let spec = QuadratureSpec::new(Rule::Trapezoid, 16, vec![0.0, 0.0], vec![1.0, 1.0], 1e-3).unwrap();
        let t = spec.tensor();
        let mut x = [0.0; 2];
        t.node(17, &mut x);
        assert_relative_eq!(x[0], 1.0 / 15.0);
        assert_relative_eq!(x[1], 1.0 / 15.0);
        let mut i = [0; 2];
        t.index(17, &mut i);
        assert_eq!(i, [1, 1]);
    }
}
