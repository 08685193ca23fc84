//! Matrix functions used throughout the crate: `exp`, `sinch`, the `F` series
//! and its inverse, commutator matrices, and guarded linear solves.
//!
//! All functions work on dynamically sized real matrices. Inputs whose norm
//! estimate exceeds a small threshold are scaled by a power of two and the
//! result is recombined with an exact duplication formula.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Matrices with a norm estimate above this are scaled before series evaluation.
const SCALING_THRESHOLD: f64 = 4.0;
/// Norm bound below which the Bernoulli series for `F(-X)^{-1}` is used directly.
const BERNOULLI_RADIUS: f64 = 2.5;
/// Condition numbers above this bound are treated as singular.
pub const CONDITION_BOUND: f64 = 1e12;
/// Residual bound (relative to the input norm) for basis decompositions.
pub const CLOSURE_TOL: f64 = 1e-9;

/// Truncation control for the power series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesSpec {
    pub max_terms: usize,
    pub abs_tol: f64,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self { max_terms: 64, abs_tol: 1e-14 }
    }
}

impl SeriesSpec {
    pub fn new(max_terms: usize, abs_tol: f64) -> Result<Self> {
        if max_terms < 8 {
            return Err(Error::InvalidParameter(format!("max_terms must be >= 8, got {max_terms}")));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("abs_tol must be positive, got {abs_tol}")));
        }
        Ok(Self { max_terms, abs_tol })
    }
}

/// Bernoulli numbers `B_k = |B_{2k}|` for k = 1..=20.
pub const BERNOULLI: [f64; 20] = [
    1.0 / 6.0,
    1.0 / 30.0,
    1.0 / 42.0,
    1.0 / 30.0,
    5.0 / 66.0,
    691.0 / 2730.0,
    7.0 / 6.0,
    3617.0 / 510.0,
    43867.0 / 798.0,
    174611.0 / 330.0,
    854513.0 / 138.0,
    236364091.0 / 2730.0,
    8553103.0 / 6.0,
    23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    261082718496449122051.0 / 13530.0,
];

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Induced 1-norm (max column sum).
pub fn norm1(a: &Mat) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Induced ∞-norm (max row sum).
pub fn norm_inf(a: &Mat) -> f64 {
    a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Cheap upper bound on the spectral radius.
pub fn norm_bound(a: &Mat) -> f64 {
    norm1(a).min(norm_inf(a))
}

fn check_input(a: &Mat, what: &str) -> Result<()> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::InvalidParameter(format!(
            "{what}: expected a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{what}: matrix has non-finite entries")));
    }
    Ok(())
}

/// Number of halvings needed to bring `bound` below `target`.
fn halvings(bound: f64, target: f64) -> i32 {
    if bound <= target {
        0
    } else {
        (bound / target).log2().ceil() as i32
    }
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn matrix_exp(a: &Mat) -> Result<Mat> {
    check_input(a, "matrix_exp")?;
    let n = a.nrows();
    let s = halvings(norm_bound(a), 0.5);
    let b = a * 2f64.powi(-s);
    let mut sum = Mat::identity(n, n);
    let mut term = Mat::identity(n, n);
    for k in 1..40 {
        term = &term * &b / k as f64;
        sum += &term;
        if max_abs(&term) <= 1e-18 * max_abs(&sum).max(1.0) {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `cosh(A) = (e^A + e^{-A})/2`.
pub fn cosh_matrix(a: &Mat) -> Result<Mat> {
    Ok((matrix_exp(a)? + matrix_exp(&-a)?) * 0.5)
}

/// `sinh(A) = (e^A - e^{-A})/2`.
pub fn sinh_matrix(a: &Mat) -> Result<Mat> {
    Ok((matrix_exp(a)? - matrix_exp(&-a)?) * 0.5)
}

fn sinch_series(a: &Mat, spec: &SeriesSpec) -> Result<Mat> {
    let n = a.nrows();
    let a2 = a * a;
    let mut sum = Mat::identity(n, n);
    let mut term = Mat::identity(n, n);
    for k in 1..spec.max_terms {
        term = &term * &a2 / ((2 * k) * (2 * k + 1)) as f64;
        sum += &term;
        let size = max_abs(&term);
        if size < spec.abs_tol {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { terms: spec.max_terms, last_term: max_abs(&term) })
}

/// `sinch(A) = Σ A^{2k}/(2k+1)!`.
///
/// Large inputs are reduced with `sinch(2B) = sinch(B)·cosh(B)`.
pub fn sinch(a: &Mat, spec: &SeriesSpec) -> Result<Mat> {
    check_input(a, "sinch")?;
    let s = halvings(norm_bound(a), SCALING_THRESHOLD);
    let mut result = sinch_series(&(a * 2f64.powi(-s)), spec)?;
    for k in (1..=s).rev() {
        let b = a * 2f64.powi(-k);
        result *= cosh_matrix(&b)?;
    }
    Ok(result)
}

fn f_plus_series(x: &Mat, spec: &SeriesSpec) -> Result<Mat> {
    let n = x.nrows();
    let mut sum = Mat::identity(n, n);
    let mut term = Mat::identity(n, n);
    for k in 2..spec.max_terms + 1 {
        term = &term * x / k as f64;
        sum += &term;
        if max_abs(&term) < spec.abs_tol {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { terms: spec.max_terms, last_term: max_abs(&term) })
}

/// `F(X) = (e^X - I)/X = I + X/2! + X²/3! + …`.
///
/// Large inputs are reduced with `F(2Y) = F(Y)(e^Y + I)/2`.
pub fn f_plus(x: &Mat, spec: &SeriesSpec) -> Result<Mat> {
    check_input(x, "f_plus")?;
    let n = x.nrows();
    let s = halvings(norm_bound(x), SCALING_THRESHOLD);
    let mut result = f_plus_series(&(x * 2f64.powi(-s)), spec)?;
    for k in (1..=s).rev() {
        let y = x * 2f64.powi(-k);
        result = result * (matrix_exp(&y)? + Mat::identity(n, n)) * 0.5;
    }
    Ok(result)
}

/// `F(-X)^{-1} = X/(I - e^{-X})`.
///
/// Uses the Bernoulli series `I + X/2 + Σ (-1)^{k-1} B_k X^{2k}/(2k)!` inside its
/// convergence region and a guarded linear solve against `F(-X)` outside it.
pub fn f_minus_inverse(x: &Mat, spec: &SeriesSpec) -> Result<Mat> {
    check_input(x, "f_minus_inverse")?;
    let n = x.nrows();
    if norm_bound(x) > BERNOULLI_RADIUS {
        let fm = f_plus(&-x, spec)?;
        return solve_guarded(&fm, &Mat::identity(n, n), "F(-X)");
    }
    let x2 = x * x;
    let mut sum = Mat::identity(n, n) + x * 0.5;
    let mut power = Mat::identity(n, n);
    let mut factorial = 1.0;
    for (k, bk) in BERNOULLI.iter().enumerate() {
        let k = k + 1;
        power = &power * &x2;
        factorial *= ((2 * k - 1) * (2 * k)) as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = &power * (sign * bk / factorial);
        let size = max_abs(&term);
        sum += term;
        if size < spec.abs_tol {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { terms: BERNOULLI.len(), last_term: max_abs(&power) })
}

pub fn det(a: &Mat) -> f64 {
    a.clone().lu().determinant()
}

/// 1-norm condition number, `inf` when singular.
pub fn condition_estimate(a: &Mat) -> f64 {
    match a.clone().lu().try_inverse() {
        Some(inv) => {
            let c = norm1(a) * norm1(&inv);
            if c.is_finite() {
                c
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

/// Solves `A·Y = B`, refusing matrices with condition estimate above [`CONDITION_BOUND`].
pub fn solve_guarded(a: &Mat, b: &Mat, context: &str) -> Result<Mat> {
    let condition = condition_estimate(a);
    if condition > CONDITION_BOUND {
        return Err(Error::SingularMatrix { context: context.to_string(), condition });
    }
    a.clone().lu().solve(b).ok_or_else(|| Error::SingularMatrix { context: context.to_string(), condition })
}

/// Guarded inverse, used for small group matrices.
pub fn inverse_guarded(a: &Mat, context: &str) -> Result<Mat> {
    solve_guarded(a, &Mat::identity(a.nrows(), a.nrows()), context)
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// `(e^z - 1)/z` with a series branch near zero.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// Scalar `sinh(x)/x` with a series branch near zero.
pub fn sinch_scalar(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// Least-squares decomposition of matrices in a fixed linearly independent basis.
#[derive(Debug, Clone)]
pub struct BasisDecomposer {
    basis: Vec<Mat>,
    pinv: Mat,
}

impl BasisDecomposer {
    pub fn new(basis: &[Mat]) -> Result<Self> {
        let first = basis.first().ok_or_else(|| Error::InvalidModel("empty basis".into()))?;
        let (r, c) = first.shape();
        if basis.iter().any(|m| m.shape() != (r, c)) {
            return Err(Error::InvalidModel("basis matrices differ in shape".into()));
        }
        let columns: Vec<Vector> = basis.iter().map(|m| Vector::from_column_slice(m.as_slice())).collect();
        let v = Mat::from_columns(&columns);
        let svd = v.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin.is_nan() || smin <= 1e-12 * smax.max(1e-300) {
            return Err(Error::InvalidModel("basis matrices are linearly dependent".into()));
        }
        let pinv = svd.pseudo_inverse(0.0).map_err(|e| Error::InvalidModel(format!("pseudo-inverse failed: {e}")))?;
        Ok(Self { basis: basis.to_vec(), pinv })
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Linear combination `Σ x_i L^i`.
    pub fn combine(&self, coeffs: &[f64]) -> Mat {
        let (r, c) = self.basis[0].shape();
        let mut out = Mat::zeros(r, c);
        for (x, l) in coeffs.iter().zip(&self.basis) {
            if *x != 0.0 {
                out += l * *x;
            }
        }
        out
    }

    /// Coefficients of `m` in the basis; fails when `m` is not in the span.
    pub fn decompose(&self, m: &Mat) -> Result<Vector> {
        let flat = Vector::from_column_slice(m.as_slice());
        let coeffs = &self.pinv * &flat;
        let recon = self.combine(coeffs.as_slice());
        let residual = (recon - m).norm();
        let scale = m.norm();
        if residual > CLOSURE_TOL * scale.max(f64::MIN_POSITIVE) && residual > 1e-300 {
            return Err(Error::BasisClosure { residual });
        }
        Ok(coeffs)
    }

    /// Matrix of `L ↦ [X, L]` in this basis.
    pub fn ad_matrix(&self, x: &Mat) -> Result<Mat> {
        let k = self.dim();
        let mut out = Mat::zeros(k, k);
        for (j, l) in self.basis.iter().enumerate() {
            let col = self.decompose(&commutator(x, l))?;
            out.set_column(j, &col);
        }
        Ok(out)
    }
}

/// Matrix of `L ↦ [X_q, L]` in `basis`.
pub fn ad_matrix(x_q: &Mat, basis: &[Mat]) -> Result<Mat> {
    BasisDecomposer::new(basis)?.ad_matrix(x_q)
}
