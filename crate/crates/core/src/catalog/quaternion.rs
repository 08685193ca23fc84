//! Quaternions with the 2×2 complex matrix model used to cross-check the
//! real 4×4 left-multiplication matrices.

use std::ops::Mul;

use num_complex::Complex64;

use crate::linalg::Mat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

impl Quaternion {
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `w + xi + yj + zk ↦ [[w + ix, y + iz], [−y + iz, w − ix]]`.
    pub fn to_complex(self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.w, self.x), Complex64::new(self.y, self.z)],
            [Complex64::new(-self.y, self.z), Complex64::new(self.w, -self.x)],
        ]
    }

    pub fn from_complex(m: &[[Complex64; 2]; 2]) -> Self {
        Self::new(m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im)
    }

    /// Real 4×4 matrix of `p ↦ q·p`.
    pub fn left_matrix(self) -> Mat {
        let (a, b, c, d) = (self.w, self.x, self.y, self.z);
        Mat::from_row_slice(4, 4, &[a, -b, -c, -d, b, a, -d, c, c, d, a, -b, d, -c, b, a])
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Product computed in the 2×2 complex model.
    fn mul(self, rhs: Quaternion) -> Quaternion {
        let a = self.to_complex();
        let b = rhs.to_complex();
        let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Quaternion::from_complex(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, Vector};

    #[test]
    fn unit_products() {
        assert_eq!(I * J, K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(I * I, Quaternion::new(-1.0, 0.0, 0.0, 0.0));
        assert_eq!(J * I, Quaternion::new(0.0, 0.0, 0.0, -1.0));
        assert_eq!(ONE.left_matrix(), Mat::identity(4, 4));
    }

    #[test]
    fn real_model_matches_complex_model() {
        let q = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        let p = Quaternion::new(-0.4, 0.5, 1.1, -0.9);
        let via_real = q.left_matrix() * Vector::from_column_slice(&p.to_array());
        let via_complex = (q * p).to_array();
        for i in 0..4 {
            assert!((via_real[i] - via_complex[i]).abs() < 1e-12);
        }
        let d = linalg::det(&q.left_matrix());
        assert!((d - q.norm().powi(4)).abs() < 1e-12 * d);
    }
}
