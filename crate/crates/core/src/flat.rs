//! Flat phase-space Wigner function on `ℝⁿ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quadrature::QuadratureSpec;
use crate::{Error, Result};

/// `h⁻ⁿ ∫ conj(φ(q − x/2))·e^{−2πi x·p/h}·ψ(q + x/2) dx` over the box of `quad`.
pub fn flat_wigner<F, G>(phi: F, psi: G, q: &[f64], p: &[f64], h_const: f64, quad: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64,
    G: Fn(&[f64]) -> Complex64,
{
    let n = q.len();
    if p.len() != n || quad.dim() != n {
        return Err(Error::InvalidParameter("q, p and the quadrature box must share a dimension".into()));
    }
    if h_const.is_nan() || h_const <= 0.0 {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    quad.validate()?;
    let rule = quad.tensor();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut s = Complex64::new(0.0, 0.0);
    let mut x = vec![0.0; n];
    for i in 0..rule.len() {
        let w = rule.node(i, &mut x);
        for d in 0..n {
            a[d] = q[d] - 0.5 * x[d];
            b[d] = q[d] + 0.5 * x[d];
        }
        let phase: f64 = -2.0 * PI * x.iter().zip(p).map(|(u, v)| u * v).sum::<f64>() / h_const;
        s += phi(&a).conj() * psi(&b) * Complex64::from_polar(w, phase);
    }
    Ok(s / h_const.powi(n as i32))
}

/// `h^{−n/2} ∫ f(x)·e^{−2πi x·p/h} dx`, the momentum-space wave function.
pub fn flat_fourier<F>(f: F, p: &[f64], h_const: f64, quad: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64,
{
    let n = p.len();
    quad.validate()?;
    let rule = quad.tensor();
    let mut x = vec![0.0; n];
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..rule.len() {
        let w = rule.node(i, &mut x);
        let phase: f64 = -2.0 * PI * x.iter().zip(p).map(|(u, v)| u * v).sum::<f64>() / h_const;
        s += f(&x) * Complex64::from_polar(w, phase);
    }
    Ok(s / h_const.powf(0.5 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Rule;

    fn gauss(x: &[f64]) -> Complex64 {
        Complex64::new(PI.powf(-0.25) * (-0.5 * x[0] * x[0]).exp(), 0.0)
    }

    #[test]
    fn gaussian_closed_form() {
        let quad = QuadratureSpec::new(Rule::GaussLegendre, 96, vec![-14.0], vec![14.0], 1e-8).unwrap();
        for (q, p) in [(0.0, 0.0), (0.7, -0.4), (-1.5, 1.1)] {
            let w = flat_wigner(gauss, gauss, &[q], &[p], 2.0 * PI, &quad).unwrap();
            assert!((w.re - (-q * q - p * p).exp() / PI).abs() < 1e-12);
            assert!(w.im.abs() < 1e-14);
        }
    }

    #[test]
    fn fourier_of_gaussian() {
        let quad = QuadratureSpec::new(Rule::GaussLegendre, 96, vec![-14.0], vec![14.0], 1e-8).unwrap();
        let v = flat_fourier(gauss, &[0.8], 2.0 * PI, &quad).unwrap();
        assert!((v - gauss(&[0.8])).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let quad = QuadratureSpec::new(Rule::GaussLegendre, 16, vec![-1.0], vec![1.0], 1e-8).unwrap();
        assert!(flat_wigner(gauss, gauss, &[0.0], &[0.0], 0.0, &quad).is_err());
        assert!(flat_wigner(gauss, gauss, &[0.0, 0.0], &[0.0], 1.0, &quad).is_err());
    }
}
