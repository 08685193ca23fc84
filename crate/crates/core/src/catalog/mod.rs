//! Built-in groups with closed forms for κ, c, exp, log and the sinch determinants.
//!
//! | name | H | orbits |
//! |------|---|--------|
//! | `diagonal` | positive diagonal 2×2 matrices | four open quadrants |
//! | `sim2` | dilations and rotations of the plane | ℝ²∖{0} |
//! | `hc` | `[[a, 0], [b, a^c]]`, `a > 0` | `γ₄ > 0`, `γ₄ < 0` |
//! | `quaternionic` | nonzero quaternions acting by left multiplication | ℝ⁴∖{0} |
//! | `counterexample3d` | generated by `I₃`, a nilpotent shift and `diag(1, 0, −1)` | four regions cut by `ω₃ = 0` and a quadric cone |
//!
//! Every basis is scaled so that each orbit representative has `|Δ(k_j)| = 1`;
//! with this normalization `c_j(γ_p) = 1/|Δ(γ_p)|` and `m_H(0) = 1`.

pub mod quaternion;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{
    Ball, CoordinateBound, ExactBoundary, ExpDomain, GroupElement, GroupModel, LieAlgebraElement, ModelExtras,
    Polynomial,
};
use crate::linalg::{self, phi1, sinch_scalar, Mat, Vector};
use crate::orbit::{self, OrbitDescriptor};

use quaternion::Quaternion;

pub const NAMES: [&str; 5] = ["diagonal", "sim2", "hc", "quaternionic", "counterexample3d"];

/// Parameter used for `hc` when none is given.
pub const DEFAULT_HC_PARAM: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogGroup {
    Diagonal,
    Sim2,
    Hc { c: f64 },
    Quaternionic,
    Counterexample3d,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub group: CatalogGroup,
    pub model: Arc<GroupModel>,
    /// Generators before normalization.
    pub generators: Vec<Mat>,
    /// `basis[i] = basis_scale[i] · generators[i]`.
    pub basis_scale: Vec<f64>,
    pub notes: Vec<String>,
}

fn orbit(label: usize, name: &str, rep: &[f64], signs: &[i8], dihedral: bool) -> OrbitDescriptor {
    OrbitDescriptor {
        label,
        name: name.to_string(),
        representative: rep.to_vec(),
        sign_signature: signs.to_vec(),
        is_dihedral_cone: dihedral,
    }
}

fn build(
    group: CatalogGroup,
    name: &str,
    generators: Vec<Mat>,
    basis_scale: Vec<f64>,
    orbits: Vec<OrbitDescriptor>,
    extras: ModelExtras,
    notes: Vec<String>,
) -> CatalogEntry {
    let basis = generators.iter().zip(&basis_scale).map(|(g, s)| g * *s).collect();
    let model = GroupModel::new(name, basis, orbits, extras).expect("catalog models are valid");
    CatalogEntry { group, model: Arc::new(model), generators, basis_scale, notes }
}

fn diag(v: &[f64]) -> Mat {
    Mat::from_diagonal(&Vector::from_column_slice(v))
}

pub fn make_diagonal() -> CatalogEntry {
    let generators = vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])];
    let orbits = vec![
        orbit(0, "(+,+)", &[1.0, 1.0], &[1, 1], true),
        orbit(1, "(+,-)", &[1.0, -1.0], &[1, -1], true),
        orbit(2, "(-,+)", &[-1.0, 1.0], &[-1, 1], true),
        orbit(3, "(-,-)", &[-1.0, -1.0], &[-1, -1], true),
    ];
    let extras = ModelExtras {
        sign_functions: vec![Polynomial::linear(&[1.0, 0.0]), Polynomial::linear(&[0.0, 1.0])],
        exp_domain: ExpDomain::unbounded(),
        exact_boundary: Some(ExactBoundary::Hyperplanes { normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }),
        probe_rays: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    let notes = vec!["Δ(ω) = ω₁ω₂; H is the identity component (a₁, a₂ > 0)".into()];
    build(CatalogGroup::Diagonal, "diagonal", generators, vec![1.0, 1.0], orbits, extras, notes)
}

pub fn make_sim2() -> CatalogEntry {
    let generators = vec![Mat::identity(2, 2), Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])];
    let orbits = vec![orbit(0, "R2\\{0}", &[1.0, 0.0], &[], true)];
    let extras = ModelExtras {
        sign_functions: vec![],
        exp_domain: ExpDomain {
            bounds: vec![CoordinateBound { coord: 1, lower: Some(-PI), upper: Some(PI) }],
            ..Default::default()
        },
        exact_boundary: Some(ExactBoundary::Origin),
        probe_rays: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    let notes = vec![
        "coordinates (λ, θ): h = e^λ·R(θ), principal branch θ ∈ (−π, π), λ ∈ ℝ".into(),
        "boundary is the origin only; treated as a degenerate hyperplane arrangement".into(),
    ];
    build(CatalogGroup::Sim2, "sim2", generators, vec![1.0, 1.0], orbits, extras, notes)
}

pub fn make_hc(c: f64) -> Result<CatalogEntry> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("hc requires a finite nonzero parameter, got {c}")));
    }
    let generators = vec![diag(&[1.0, c]), Mat::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0])];
    let scale = vec![1.0, 1.0 / c.abs()];
    let orbits = vec![orbit(0, "gamma4>0", &[0.0, 1.0], &[1], true), orbit(1, "gamma4<0", &[0.0, -1.0], &[-1], true)];
    let extras = ModelExtras {
        sign_functions: vec![Polynomial::linear(&[0.0, 1.0])],
        exp_domain: ExpDomain::unbounded(),
        exact_boundary: Some(ExactBoundary::Hyperplanes { normals: vec![vec![0.0, 1.0]] }),
        probe_rays: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    };
    let notes = vec![format!("second generator scaled by 1/|c| = {}; Δ(ω) = −sign(c)·ω₂²", 1.0 / c.abs())];
    Ok(build(CatalogGroup::Hc { c }, "hc", generators, scale, orbits, extras, notes))
}

pub fn make_quaternionic() -> CatalogEntry {
    let generators =
        [quaternion::ONE, quaternion::I, quaternion::J, quaternion::K].iter().map(|q| q.left_matrix()).collect();
    let orbits = vec![orbit(0, "R4\\{0}", &[1.0, 0.0, 0.0, 0.0], &[], true)];
    let extras = ModelExtras {
        sign_functions: vec![],
        exp_domain: ExpDomain { balls: vec![Ball { coords: vec![1, 2, 3], radius: PI }], ..Default::default() },
        exact_boundary: Some(ExactBoundary::Origin),
        probe_rays: vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]],
    };
    let notes = vec![
        "basis: left multiplication by 1, i, j, k; Δ(ω) = −|ω|⁴".into(),
        "exponential chart: x₀ ∈ ℝ, |x⃗| < π".into(),
    ];
    build(CatalogGroup::Quaternionic, "quaternionic", generators, vec![1.0; 4], orbits, extras, notes)
}

pub fn make_counterexample3d() -> CatalogEntry {
    let generators = vec![
        Mat::identity(3, 3),
        Mat::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        diag(&[1.0, 0.0, -1.0]),
    ];
    let scale = vec![1.0, 1.0, -1.0 / 3.0];
    let q = Polynomial {
        terms: vec![
            crate::group::Monomial { coeff: 1.0, powers: vec![0, 2, 0] },
            crate::group::Monomial { coeff: -2.0, powers: vec![1, 0, 1] },
        ],
    };
    let orbits = vec![
        orbit(0, "O1", &[1.5, 0.0, 1.0], &[1, -1], false),
        orbit(1, "O2", &[-1.5, 0.0, 1.0], &[1, 1], false),
        orbit(2, "O3", &[-1.5, 0.0, -1.0], &[-1, -1], false),
        orbit(3, "O4", &[1.5, 0.0, -1.0], &[-1, 1], false),
    ];
    let extras = ModelExtras {
        sign_functions: vec![Polynomial::linear(&[0.0, 0.0, 1.0]), q],
        exp_domain: ExpDomain::unbounded(),
        exact_boundary: Some(ExactBoundary::NonPlanar {
            description: "ω₃ = 0 together with the cone ω₂² − 2ω₁ω₃ = 0".into(),
        }),
        probe_rays: vec![vec![0.0, 1.0, 0.0]],
    };
    let notes = vec![
        "third generator scaled by −1/3 so that Δ(ω) = −(1/3)·ω₃·(ω₂² − 2ω₁ω₃)".into(),
        "orbits: O1 ω₃>0, Q<0; O2 ω₃>0, Q>0; O3 ω₃<0, Q<0; O4 ω₃<0, Q>0 with Q = ω₂² − 2ω₁ω₃".into(),
    ];
    build(CatalogGroup::Counterexample3d, "counterexample3d", generators, scale, orbits, extras, notes)
}

/// All five groups (`hc` with the default parameter).
pub fn all() -> Vec<CatalogEntry> {
    vec![
        make_diagonal(),
        make_sim2(),
        make_hc(DEFAULT_HC_PARAM).expect("default parameter is valid"),
        make_quaternionic(),
        make_counterexample3d(),
    ]
}

pub fn by_name(name: &str, param: Option<f64>) -> Result<CatalogEntry> {
    match name {
        "diagonal" => Ok(make_diagonal()),
        "sim2" => Ok(make_sim2()),
        "hc" => make_hc(param.unwrap_or(DEFAULT_HC_PARAM)),
        "quaternionic" => Ok(make_quaternionic()),
        "counterexample3d" => Ok(make_counterexample3d()),
        other => Err(Error::InvalidParameter(format!("unknown group '{other}' (known: {})", NAMES.join(", ")))),
    }
}

/// `|sinh(z)/z|` for complex `z`.
fn abs_sinch_complex(z: Complex64) -> f64 {
    if z.norm() < 1e-4 {
        (Complex64::new(1.0, 0.0) + z * z / 6.0).norm()
    } else {
        (z.sinh() / z).norm()
    }
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        &self.model.name
    }

    /// Closed-form `κ_j(γ_p)`: the `h` with `γ_pᵀh = k_jᵀ`.
    pub fn kappa_closed(&self, gamma_p: &Vector, orbit: &OrbitDescriptor) -> Result<Mat> {
        if orbit::classify_label(gamma_p.as_slice(), &self.model) != Some(orbit.label) {
            return Err(Error::NoSolution(format!("γ_p = {:?} not on orbit {}", gamma_p.as_slice(), orbit.label)));
        }
        let k = &orbit.representative;
        let g = gamma_p.as_slice();
        Ok(match self.group {
            CatalogGroup::Diagonal => diag(&[k[0] / g[0], k[1] / g[1]]),
            CatalogGroup::Sim2 => {
                let r = (g[0] * g[0] + g[1] * g[1]).sqrt();
                let (s, c) = (g[1] / r, g[0] / r);
                Mat::from_row_slice(2, 2, &[c, -s, s, c]) / r
            }
            CatalogGroup::Hc { c } => {
                let s = k[1];
                let a = (g[1] / s).powf(-1.0 / c);
                let b = -g[0] * a.powf(1.0 + c) / s;
                Mat::from_row_slice(2, 2, &[a, 0.0, b, a.powf(c)])
            }
            CatalogGroup::Quaternionic => {
                let q = Quaternion::from_slice(g);
                let n2 = q.norm().powi(2);
                Quaternion::new(q.w / n2, q.x / n2, q.y / n2, q.z / n2).left_matrix()
            }
            CatalogGroup::Counterexample3d => {
                let qk = k[1] * k[1] - 2.0 * k[0] * k[2];
                let qg = g[1] * g[1] - 2.0 * g[0] * g[2];
                let s = (qk / qg).sqrt();
                let u = k[2] / g[2];
                let e = s / u;
                let b = (k[1] - s * g[1]) / k[2];
                Mat::from_row_slice(3, 3, &[e, 0.0, 0.0, b, 1.0, 0.0, b * b / (2.0 * e), b / e, 1.0 / e]) * s
            }
        })
    }

    /// Closed-form `c_j(γ_p)`.
    pub fn c_closed(&self, gamma_p: &[f64]) -> f64 {
        let g = gamma_p;
        match self.group {
            CatalogGroup::Diagonal => 1.0 / (g[0] * g[1]).abs(),
            CatalogGroup::Sim2 => 1.0 / (g[0] * g[0] + g[1] * g[1]),
            CatalogGroup::Hc { .. } => 1.0 / (g[1] * g[1]),
            CatalogGroup::Quaternionic => 1.0 / g.iter().map(|v| v * v).sum::<f64>().powi(2),
            CatalogGroup::Counterexample3d => 3.0 / (g[2] * (g[1] * g[1] - 2.0 * g[0] * g[2])).abs(),
        }
    }

    /// Closed-form `e^{X_q}`.
    pub fn exp_h_closed(&self, x: &[f64]) -> Mat {
        match self.group {
            CatalogGroup::Diagonal => diag(&[x[0].exp(), x[1].exp()]),
            CatalogGroup::Sim2 => {
                Mat::from_row_slice(2, 2, &[x[1].cos(), -x[1].sin(), x[1].sin(), x[1].cos()]) * x[0].exp()
            }
            CatalogGroup::Hc { c } => {
                let off = x[1] / c.abs() * x[0].exp() * phi1((c - 1.0) * x[0]);
                Mat::from_row_slice(2, 2, &[x[0].exp(), 0.0, off, (c * x[0]).exp()])
            }
            CatalogGroup::Quaternionic => {
                let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
                let f = x[0].exp();
                let s = f * if r < 1e-8 { 1.0 - r * r / 6.0 } else { r.sin() / r };
                Quaternion::new(f * r.cos(), s * x[1], s * x[2], s * x[3]).left_matrix()
            }
            CatalogGroup::Counterexample3d => {
                let xq = self.model.x_q_matrix(x);
                linalg::matrix_exp(&xq).expect("finite input")
            }
        }
    }

    /// Closed-form `log h` in basis coordinates, for `h` in the exponential image.
    pub fn log_h(&self, h: &Mat) -> Result<Vector> {
        let outside = || Error::Domain("matrix is outside the image of the exponential chart".into());
        let v = match self.group {
            CatalogGroup::Diagonal => {
                if h[(0, 0)] <= 0.0 || h[(1, 1)] <= 0.0 {
                    return Err(outside());
                }
                vec![h[(0, 0)].ln(), h[(1, 1)].ln()]
            }
            CatalogGroup::Sim2 => {
                let (a, b) = (h[(0, 0)], h[(1, 0)]);
                let theta = b.atan2(a);
                if theta.abs() >= PI {
                    return Err(outside());
                }
                vec![0.5 * (a * a + b * b).ln(), theta]
            }
            CatalogGroup::Hc { c } => {
                if h[(0, 0)] <= 0.0 {
                    return Err(outside());
                }
                let x1 = h[(0, 0)].ln();
                vec![x1, c.abs() * h[(1, 0)] / (x1.exp() * phi1((c - 1.0) * x1))]
            }
            CatalogGroup::Quaternionic => {
                let q = Quaternion::new(h[(0, 0)], h[(1, 0)], h[(2, 0)], h[(3, 0)]);
                let nq = q.norm();
                let vn = (q.x * q.x + q.y * q.y + q.z * q.z).sqrt();
                let r = vn.atan2(q.w);
                if r >= PI - 1e-12 {
                    return Err(outside());
                }
                let f = if vn < 1e-300 { 0.0 } else { r / vn };
                vec![nq.ln(), f * q.x, f * q.y, f * q.z]
            }
            CatalogGroup::Counterexample3d => {
                return Err(Error::InvalidParameter("no closed-form logarithm for counterexample3d".into()))
            }
        };
        Ok(Vector::from_vec(v))
    }

    /// `log(b, h) = (log h, F(X_q)⁻¹ b)`.
    pub fn log_g(&self, g: &GroupElement) -> Result<LieAlgebraElement> {
        let x_q = self.log_h(&g.h)?;
        let f = linalg::f_plus(&self.model.x_q_matrix(x_q.as_slice()), &self.model.series)?;
        let x_p = linalg::solve_guarded(&f, &Mat::from_column_slice(self.model.n, 1, g.b.as_slice()), "F(X_q)")?;
        Ok(LieAlgebraElement { x_q, x_p: x_p.column(0).into() })
    }

    /// Closed-form `det sinch(X_q/2)`.
    pub fn det_sinch_half(&self, x: &[f64]) -> f64 {
        match self.group {
            CatalogGroup::Diagonal => sinch_scalar(x[0] / 2.0) * sinch_scalar(x[1] / 2.0),
            CatalogGroup::Sim2 => abs_sinch_complex(Complex64::new(x[0], x[1]) / 2.0).powi(2),
            CatalogGroup::Hc { c } => sinch_scalar(x[0] / 2.0) * sinch_scalar(c * x[0] / 2.0),
            CatalogGroup::Quaternionic => {
                let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
                abs_sinch_complex(Complex64::new(x[0], r) / 2.0).powi(4)
            }
            CatalogGroup::Counterexample3d => {
                let s = linalg::sinch(&(self.model.x_q_matrix(x) * 0.5), &self.model.series).expect("finite input");
                linalg::det(&s)
            }
        }
    }

    /// Closed-form `det sinch(ad X_q/2)`.
    pub fn det_sinch_ad_half(&self, x: &[f64]) -> f64 {
        match self.group {
            CatalogGroup::Diagonal | CatalogGroup::Sim2 => 1.0,
            CatalogGroup::Hc { c } => sinch_scalar((c - 1.0) * x[0] / 2.0),
            CatalogGroup::Quaternionic => {
                let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
                let s = if r < 1e-6 { 1.0 - r * r / 6.0 } else { r.sin() / r };
                s * s
            }
            CatalogGroup::Counterexample3d => {
                let ad = self.model.ad(x).expect("closed basis");
                linalg::det(&linalg::sinch(&(ad * 0.5), &self.model.series).expect("finite input"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Classification;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orbit_counts() {
        let counts: Vec<usize> = all().iter().map(|e| e.model.orbits.len()).collect();
        assert_eq!(counts, vec![4, 1, 2, 1, 4]);
    }

    #[test]
    fn diagonal_values() {
        let e = make_diagonal();
        let w = Vector::from_vec(vec![2.0, 3.0]);
        assert_eq!(orbit::delta(&w, &e.model), 6.0);
        assert_eq!(orbit::classify_point(&w, &e.model).unwrap(), Classification::Orbit(0));
        assert!((e.c_closed(&[2.0, 3.0]) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn sim2_values() {
        let e = make_sim2();
        assert_eq!(e.c_closed(&[1.0, 0.0]), 1.0);
        assert!((e.det_sinch_half(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
        let (l, t) = (0.7, -2.1);
        let expect = (2.0 * f64::cosh(l) - 2.0 * f64::cos(t)) / (l * l + t * t);
        assert!((e.det_sinch_half(&[l, t]) - expect).abs() < 1e-14);
        assert!((e.model.ad(&[l, t]).unwrap()).abs().max() == 0.0);
    }

    #[test]
    fn hc_values() {
        let e = make_hc(2.0).unwrap();
        assert!((e.c_closed(&[0.3, 2.0]) - 0.25).abs() < 1e-15);
        assert!(matches!(make_hc(0.0), Err(Error::InvalidParameter(_))));
        // upper half plane is the orbit of (0, 1)
        let up = orbit::classify_point(&Vector::from_vec(vec![-5.0, 0.1]), &e.model).unwrap();
        assert_eq!(up, Classification::Orbit(0));
        // printed-generator coordinate: x₂' = x₂/|c|
        let c = 2.0;
        let (x1, x2) = (0.6, 1.5);
        let h = e.exp_h_closed(&[x1, x2 * c]);
        let expect = x2 * ((c * x1).exp() - x1.exp()) / ((c - 1.0) * x1);
        assert!((h[(1, 0)] - expect).abs() < 1e-14);
    }

    #[test]
    fn hc_limit_branch() {
        let e = make_hc(1.0).unwrap();
        let h = e.exp_h_closed(&[0.4, 1.0]);
        assert!((h[(1, 0)] - 0.4f64.exp()).abs() < 1e-15);
        let g = linalg::matrix_exp(&e.model.x_q_matrix(&[0.4, 1.0])).unwrap();
        assert!((h - g).abs().max() < 1e-14);
    }

    #[test]
    fn quaternion_norm_determinant() {
        let e = make_quaternionic();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = Quaternion::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let d = linalg::det(&q.left_matrix());
            assert!((d - q.norm().powi(4)).abs() < 1e-12 * d);
            // adjoint action is conjugation: M(h) fixes the real unit and is a rotation
            let m = e.model.adjoint_matrix_h(&q.left_matrix()).unwrap();
            assert!((m[(0, 0)] - 1.0).abs() < 1e-12);
            assert!((linalg::det(&m) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn counterexample_values() {
        let e = make_counterexample3d();
        assert_eq!(e.generators[0], Mat::identity(3, 3));
        assert_eq!(e.generators[1], Mat::from_row_slice(3, 3, &[0., 0., 0., 1., 0., 0., 0., 1., 0.]));
        assert_eq!(e.generators[2], diag(&[1.0, 0.0, -1.0]));
        let w = Vector::from_vec(vec![1.0, 0.0, 1.0]);
        assert!((orbit::delta(&w, &e.model) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(orbit::classify_point(&w, &e.model).unwrap(), Classification::Orbit(0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let w: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let expect = -(1.0 / 3.0) * w[2] * (-2.0 * w[2] * w[0] + w[1] * w[1]);
            assert!((orbit::delta_slice(&w, &e.model) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_exp_matches_series_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for e in all() {
            for _ in 0..20 {
                let x = e.model.sample_x_q(&mut rng, 1.5);
                let a = e.exp_h_closed(x.as_slice());
                let b = linalg::matrix_exp(&e.model.x_q_matrix(x.as_slice())).unwrap();
                assert!((&a - &b).abs().max() < 1e-12 * b.abs().max(), "{}", e.name());
            }
        }
    }

    #[test]
    fn closed_log_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for e in all().into_iter().filter(|e| e.group != CatalogGroup::Counterexample3d) {
            for _ in 0..20 {
                let x = e.model.sample_x_q(&mut rng, 2.0);
                let back = e.log_h(&e.exp_h_closed(x.as_slice())).unwrap();
                assert!((&back - &x).amax() < 1e-10, "{}", e.name());
            }
        }
    }

    #[test]
    fn closed_sinch_determinants_match_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for e in all() {
            for _ in 0..20 {
                let x = e.model.sample_x_q(&mut rng, 2.5);
                let s = linalg::sinch(&(e.model.x_q_matrix(x.as_slice()) * 0.5), &e.model.series).unwrap();
                let a = linalg::det(&s);
                assert!((a - e.det_sinch_half(x.as_slice())).abs() < 1e-11 * a.abs().max(1.0), "{}", e.name());
                let ad = e.model.ad(x.as_slice()).unwrap();
                let b = linalg::det(&linalg::sinch(&(ad * 0.5), &e.model.series).unwrap());
                assert!((b - e.det_sinch_ad_half(x.as_slice())).abs() < 1e-11, "{}", e.name());
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(by_name("nope", None), Err(Error::InvalidParameter(_))));
        for n in NAMES {
            assert_eq!(by_name(n, None).unwrap().name(), n);
        }
    }
}
