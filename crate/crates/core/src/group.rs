//! Semidirect-product groups `ℝⁿ ⋊ H` described by a basis of the Lie algebra of `H`.
//!
//! Elements are pairs `(b, h)` with `(b₁, h₁)(b₂, h₂) = (b₁ + h₁b₂, h₁h₂)`.
//! Dual vectors (`γ_q`, `γ_p`, `ω`) are row vectors stored as column
//! [`Vector`]s; `γ·M` is computed as `Mᵀγ`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, BasisDecomposer, Mat, SeriesSpec, Vector};
use crate::orbit::OrbitDescriptor;

/// Tolerance for the Jacobi identity and antisymmetry checks.
const JACOBI_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub b: Vector,
    pub h: Mat,
}

impl GroupElement {
    pub fn new(b: Vector, h: Mat) -> Result<Self> {
        if h.nrows() != b.len() || !h.is_square() {
            return Err(Error::InvalidParameter("group element dimensions disagree".into()));
        }
        if linalg::det(&h).abs() <= 1e-12 {
            return Err(Error::SingularMatrix { context: "group element h".into(), condition: f64::INFINITY });
        }
        Ok(Self { b, h })
    }

    pub fn identity(n: usize) -> Self {
        Self { b: Vector::zeros(n), h: Mat::identity(n, n) }
    }

    pub fn translation(b: Vector) -> Self {
        let n = b.len();
        Self { b, h: Mat::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `(n+1)×(n+1)` affine matrix `[[h, b], [0, 1]]`.
    pub fn affine(&self) -> Mat {
        let n = self.dim();
        let mut m = Mat::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.h);
        m.view_mut((0, n), (n, 1)).copy_from(&self.b);
        m[(n, n)] = 1.0;
        m
    }

    pub fn from_affine(m: &Mat) -> Self {
        let n = m.nrows() - 1;
        Self { b: m.view((0, n), (n, 1)).clone_owned().column(0).into(), h: m.view((0, 0), (n, n)).clone_owned() }
    }
}

/// `(b₁ + h₁b₂, h₁h₂)`.
pub fn multiply(g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    GroupElement { b: &g1.b + &g1.h * &g2.b, h: &g1.h * &g2.h }
}

/// `(−h⁻¹b, h⁻¹)`.
pub fn inverse(g: &GroupElement) -> Result<GroupElement> {
    let hinv = linalg::inverse_guarded(&g.h, "inverse of h")?;
    Ok(GroupElement { b: -(&hinv * &g.b), h: hinv })
}

/// Coordinates `(x_q, x_p)` of a Lie algebra element.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraElement {
    pub x_q: Vector,
    pub x_p: Vector,
}

impl LieAlgebraElement {
    pub fn new(x_q: Vector, x_p: Vector) -> Self {
        Self { x_q, x_p }
    }

    pub fn zero(n: usize) -> Self {
        Self { x_q: Vector::zeros(n), x_p: Vector::zeros(n) }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.x_q.iter().chain(self.x_p.iter()).copied().collect()
    }

    pub fn from_slice(x: &[f64]) -> Self {
        let n = x.len() / 2;
        Self { x_q: Vector::from_column_slice(&x[..n]), x_p: Vector::from_column_slice(&x[n..]) }
    }
}

/// A point `(γ_q, γ_p)` of the dual of the Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct CoadjointPoint {
    pub gamma_q: Vector,
    pub gamma_p: Vector,
    pub orbit_label: Option<usize>,
}

impl CoadjointPoint {
    pub fn new(gamma_q: Vector, gamma_p: Vector) -> Self {
        Self { gamma_q, gamma_p, orbit_label: None }
    }

    pub fn from_slice(x: &[f64]) -> Self {
        let n = x.len() / 2;
        Self::new(Vector::from_column_slice(&x[..n]), Vector::from_column_slice(&x[n..]))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.gamma_q.iter().chain(self.gamma_p.iter()).copied().collect()
    }
}

/// Open coordinate bound `lower < x[coord] < upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateBound {
    pub coord: usize,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
}

/// Open half-space `normal·x < offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Open ball `Σ_{c ∈ coords} x_c² < radius²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub coords: Vec<usize>,
    pub radius: f64,
}

/// The set of `x_q` on which the exponential map is used as a chart.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpDomain {
    #[serde(default)]
    pub bounds: Vec<CoordinateBound>,
    #[serde(default)]
    pub half_spaces: Vec<HalfSpace>,
    #[serde(default)]
    pub balls: Vec<Ball>,
}

impl ExpDomain {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let bounds_ok = self.bounds.iter().all(|b| {
            let v = x[b.coord];
            b.lower.is_none_or(|lo| v > lo) && b.upper.is_none_or(|hi| v < hi)
        });
        let half_ok =
            self.half_spaces.iter().all(|h| h.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() < h.offset);
        let ball_ok =
            self.balls.iter().all(|b| b.coords.iter().map(|&c| x[c] * x[c]).sum::<f64>() < b.radius * b.radius);
        bounds_ok && half_ok && ball_ok
    }

    /// Box bounds on coordinate `i` implied by coordinate bounds and balls.
    pub fn coordinate_range(&self, i: usize) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for b in self.bounds.iter().filter(|b| b.coord == i) {
            if let Some(l) = b.lower {
                lo = lo.max(l);
            }
            if let Some(u) = b.upper {
                hi = hi.min(u);
            }
        }
        for b in self.balls.iter().filter(|b| b.coords.contains(&i)) {
            lo = lo.max(-b.radius);
            hi = hi.min(b.radius);
        }
        (lo, hi)
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = self.bounds.iter().any(|b| b.coord >= n)
            || self.half_spaces.iter().any(|h| h.normal.len() != n)
            || self.balls.iter().any(|b| b.coords.iter().any(|&c| c >= n) || b.radius.is_nan() || b.radius <= 0.0);
        if bad {
            return Err(Error::InvalidModel("exp_domain constraint refers to a missing coordinate".into()));
        }
        Ok(())
    }
}

/// One monomial `coeff · Π ω_i^{powers_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// Sparse real polynomial in the dual coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn eval(&self, w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| m.coeff * m.powers.iter().zip(w).map(|(&p, &x)| x.powi(p as i32)).product::<f64>())
            .sum()
    }

    /// Linear form `Σ a_i ω_i`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, &c)| {
                let mut powers = vec![0; n];
                powers[i] = 1;
                Monomial { coeff: c, powers }
            })
            .collect();
        Self { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|m| m.powers.iter().sum()).max().unwrap_or(0)
    }
}

/// Exact description of the zero set of Δ, when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactBoundary {
    /// Union of hyperplanes through the origin, given by their normals.
    Hyperplanes { normals: Vec<Vec<f64>> },
    /// Only the origin: a single open orbit.
    Origin,
    /// Not a hyperplane arrangement.
    NonPlanar { description: String },
}

/// Serialized form of [`GroupModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupModelDoc {
    pub name: String,
    pub n: usize,
    /// Basis matrices of the Lie algebra of `H`, each row-major.
    pub basis: Vec<Vec<f64>>,
    /// Nonzero structure constants `[i, j, k, c^{ij}_k]`, zero-based.
    #[serde(default)]
    pub structure_constants: Vec<(usize, usize, usize, f64)>,
    pub orbits: Vec<OrbitDescriptor>,
    #[serde(default)]
    pub sign_functions: Vec<Polynomial>,
    #[serde(default)]
    pub exp_domain: ExpDomain,
    #[serde(default)]
    pub exact_boundary: Option<ExactBoundary>,
    #[serde(default)]
    pub probe_rays: Vec<Vec<f64>>,
}

/// Immutable description of one group `ℝⁿ ⋊ H`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GroupModelDoc", into = "GroupModelDoc")]
pub struct GroupModel {
    pub name: String,
    pub n: usize,
    pub h_basis: Vec<Mat>,
    /// Dense `c^{ij}_k`, index `(i·2n + j)·2n + k`.
    structure_constants: Vec<f64>,
    pub orbits: Vec<OrbitDescriptor>,
    pub sign_functions: Vec<Polynomial>,
    pub exp_domain: ExpDomain,
    pub exact_boundary: Option<ExactBoundary>,
    /// `x_q` directions swept by the sinch mixing probe.
    pub probe_rays: Vec<Vec<f64>>,
    pub series: SeriesSpec,
    decomposer: BasisDecomposer,
}

/// Parts of a model that are not derived from the basis.
#[derive(Debug, Clone, Default)]
pub struct ModelExtras {
    pub sign_functions: Vec<Polynomial>,
    pub exp_domain: ExpDomain,
    pub exact_boundary: Option<ExactBoundary>,
    pub probe_rays: Vec<Vec<f64>>,
}

impl GroupModel {
    pub fn new(name: &str, h_basis: Vec<Mat>, orbits: Vec<OrbitDescriptor>, extras: ModelExtras) -> Result<Self> {
        let n = h_basis.len();
        if n == 0 || h_basis.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::InvalidModel(format!("{name}: expected {n} matrices of size {n}x{n}")));
        }
        extras.exp_domain.validate(n)?;
        let decomposer = BasisDecomposer::new(&h_basis)?;
        let structure_constants = compute_structure_constants(n, &decomposer)?;
        let model = Self {
            name: name.to_string(),
            n,
            h_basis,
            structure_constants,
            orbits,
            sign_functions: extras.sign_functions,
            exp_domain: extras.exp_domain,
            exact_boundary: extras.exact_boundary,
            probe_rays: extras.probe_rays,
            series: SeriesSpec::default(),
            decomposer,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let d = 2 * self.n;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if (self.c(i, j, k) + self.c(j, i, k)).abs() > JACOBI_TOL {
                        return Err(Error::InvalidModel("structure constants are not antisymmetric".into()));
                    }
                    if i >= self.n && j >= self.n && self.c(i, j, k) != 0.0 {
                        return Err(Error::InvalidModel("translations do not commute".into()));
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for m in 0..d {
                        let s: f64 = (0..d)
                            .map(|l| {
                                self.c(i, j, l) * self.c(l, k, m)
                                    + self.c(j, k, l) * self.c(l, i, m)
                                    + self.c(k, i, l) * self.c(l, j, m)
                            })
                            .sum();
                        if s.abs() > JACOBI_TOL {
                            return Err(Error::InvalidModel(format!("Jacobi identity fails on ({i},{j},{k})")));
                        }
                    }
                }
            }
        }
        if self.orbits.is_empty() {
            return Err(Error::InvalidModel("no orbit representatives".into()));
        }
        for (idx, o) in self.orbits.iter().enumerate() {
            if o.label != idx {
                return Err(Error::InvalidModel("orbit labels must be 0, 1, 2, ... in order".into()));
            }
            if o.representative.len() != self.n {
                return Err(Error::InvalidModel(format!("orbit {idx}: representative has wrong length")));
            }
            if o.sign_signature.len() != self.sign_functions.len() {
                return Err(Error::InvalidModel(format!("orbit {idx}: sign signature length mismatch")));
            }
            let d = crate::orbit::delta(&Vector::from_column_slice(&o.representative), self);
            if ((d.abs() - 1.0).abs()) > 1e-9 {
                return Err(Error::InvalidModel(format!(
                    "orbit {idx}: representative must satisfy |Δ(k)| = 1 (got {d}); rescale the basis or representative"
                )));
            }
            match crate::orbit::classify_point(&Vector::from_column_slice(&o.representative), self)? {
                crate::orbit::Classification::Orbit(l) if l == idx => {}
                other => {
                    return Err(Error::InvalidModel(format!("orbit {idx}: representative classifies as {other:?}")))
                }
            }
        }
        Ok(())
    }

    /// Structure constant `c^{ij}_k`, zero-based indices in `0..2n`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = 2 * self.n;
        self.structure_constants[(i * d + j) * d + k]
    }

    pub fn decomposer(&self) -> &BasisDecomposer {
        &self.decomposer
    }

    /// `X_q = Σ x_i L^i`.
    pub fn x_q_matrix(&self, x_q: &[f64]) -> Mat {
        self.decomposer.combine(x_q)
    }

    /// `[𝔛b]`: the matrix whose columns are `L^i b`.
    pub fn bracket_matrix(&self, b: &Vector) -> Mat {
        let cols: Vec<Vector> = self.h_basis.iter().map(|l| l * b).collect();
        Mat::from_columns(&cols)
    }

    /// `(n+1)×(n+1)` matrix form `[[X_q, x_p], [0, 0]]` of a Lie algebra element.
    pub fn algebra_matrix(&self, x: &LieAlgebraElement) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.x_q_matrix(x.x_q.as_slice()));
        m.view_mut((0, n), (n, 1)).copy_from(&x.x_p);
        m
    }

    /// Coordinates of an `(n+1)×(n+1)` algebra matrix.
    pub fn algebra_coords(&self, m: &Mat) -> Result<LieAlgebraElement> {
        let n = self.n;
        let x_q = self.decomposer.decompose(&m.view((0, 0), (n, n)).clone_owned())?;
        let x_p: Vector = m.view((0, n), (n, 1)).clone_owned().column(0).into();
        Ok(LieAlgebraElement { x_q, x_p })
    }

    pub fn in_exp_domain(&self, x_q: &[f64]) -> bool {
        self.exp_domain.contains(x_q)
    }

    /// `exp X = (F(X_q)·x_p, e^{X_q})`.
    pub fn exp_map(&self, x: &LieAlgebraElement) -> Result<GroupElement> {
        if !self.in_exp_domain(x.x_q.as_slice()) {
            return Err(Error::Domain(format!("x_q = {:?} outside the exponential domain", x.x_q.as_slice())));
        }
        let xq = self.x_q_matrix(x.x_q.as_slice());
        let h = linalg::matrix_exp(&xq)?;
        let b = linalg::f_plus(&xq, &self.series)? * &x.x_p;
        Ok(GroupElement { b, h })
    }

    /// `M(h)`: columns are the coordinates of `h L^k h⁻¹`.
    pub fn adjoint_matrix_h(&self, h: &Mat) -> Result<Mat> {
        let hinv = linalg::inverse_guarded(h, "adjoint of h")?;
        let n = self.n;
        let mut m = Mat::zeros(n, n);
        for (k, l) in self.h_basis.iter().enumerate() {
            m.set_column(k, &self.decomposer.decompose(&(h * l * &hinv))?);
        }
        Ok(m)
    }

    /// `M(b, h) = [[M(h), 0], [−[𝔛b]M(h), h]]`.
    pub fn adjoint_matrix_g(&self, g: &GroupElement) -> Result<Mat> {
        let n = self.n;
        let mh = self.adjoint_matrix_h(&g.h)?;
        let lower = -(self.bracket_matrix(&g.b) * &mh);
        let mut m = Mat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&mh);
        m.view_mut((n, 0), (n, n)).copy_from(&lower);
        m.view_mut((n, n), (n, n)).copy_from(&g.h);
        Ok(m)
    }

    /// Coadjoint action `γ ↦ γ·M(g⁻¹)`; a left action:
    /// `coAd_{g₁}∘coAd_{g₂} = coAd_{g₁g₂}`.
    pub fn coadjoint_apply(&self, g: &GroupElement, p: &CoadjointPoint) -> Result<CoadjointPoint> {
        let hinv = linalg::inverse_guarded(&g.h, "coadjoint action")?;
        let m_inv = self.adjoint_matrix_h(&hinv)?;
        let gp_hinv = hinv.tr_mul(&p.gamma_p);
        let gamma_q = m_inv.tr_mul(&p.gamma_q) + self.bracket_matrix(&g.b).tr_mul(&gp_hinv);
        Ok(CoadjointPoint { gamma_q, gamma_p: gp_hinv, orbit_label: p.orbit_label })
    }

    /// `(Δ_G, Δ_H)` with `Δ_H = 1/|det M(h)|` and `Δ_G = Δ_H/|det h|`.
    pub fn modular_functions(&self, g: &GroupElement) -> Result<(f64, f64)> {
        let dm = linalg::det(&self.adjoint_matrix_h(&g.h)?).abs();
        let dh = linalg::det(&g.h).abs();
        if dm <= 1e-300 || dh <= 1e-300 {
            return Err(Error::SingularMatrix { context: "modular function".into(), condition: f64::INFINITY });
        }
        let delta_h = 1.0 / dm;
        Ok((delta_h / dh, delta_h))
    }

    /// `ad X_q` in the basis of the Lie algebra of `H`.
    pub fn ad(&self, x_q: &[f64]) -> Result<Mat> {
        self.decomposer.ad_matrix(&self.x_q_matrix(x_q))
    }

    /// `m_H(x_q) = |det(e^{−ad X_q/2} sinch(ad X_q/2))|`.
    pub fn haar_density_h(&self, x_q: &[f64]) -> Result<f64> {
        let ad = self.ad(x_q)?;
        let s = linalg::sinch(&(&ad * 0.5), &self.series)?;
        Ok((linalg::det(&s) * (-0.5 * ad.trace()).exp()).abs())
    }

    /// `m_G(X) = |det F(−X_q) · det F(−ad X_q)|`.
    pub fn haar_density_g(&self, x: &LieAlgebraElement) -> Result<f64> {
        let xq = self.x_q_matrix(x.x_q.as_slice());
        let ad = self.decomposer.ad_matrix(&xq)?;
        let a = linalg::det(&linalg::f_plus(&-xq, &self.series)?);
        let b = linalg::det(&linalg::f_plus(&-ad, &self.series)?);
        Ok((a * b).abs())
    }

    /// Random `x_q` in `[−scale, scale]ⁿ ∩ exp_domain`.
    pub fn sample_x_q<R: Rng>(&self, rng: &mut R, scale: f64) -> Vector {
        loop {
            let v: Vec<f64> = (0..self.n).map(|_| rng.gen_range(-scale..scale)).collect();
            if self.in_exp_domain(&v) {
                return Vector::from_vec(v);
            }
        }
    }

    /// Random group element `exp(X)` with `x_q` in `[−h_scale, h_scale]ⁿ` and `x_p` in `[−b_scale, b_scale]ⁿ`.
    pub fn sample_element<R: Rng>(&self, rng: &mut R, h_scale: f64, b_scale: f64) -> GroupElement {
        let x_q = self.sample_x_q(rng, h_scale);
        let x_p = Vector::from_iterator(self.n, (0..self.n).map(|_| rng.gen_range(-b_scale..b_scale)));
        self.exp_map(&LieAlgebraElement { x_q, x_p }).expect("sampled inside the exponential domain")
    }

    pub fn to_doc(&self) -> GroupModelDoc {
        let d = 2 * self.n;
        let mut sc = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = self.c(i, j, k);
                    if v != 0.0 {
                        sc.push((i, j, k, v));
                    }
                }
            }
        }
        GroupModelDoc {
            name: self.name.clone(),
            n: self.n,
            basis: self.h_basis.iter().map(|m| m.transpose().as_slice().to_vec()).collect(),
            structure_constants: sc,
            orbits: self.orbits.clone(),
            sign_functions: self.sign_functions.clone(),
            exp_domain: self.exp_domain.clone(),
            exact_boundary: self.exact_boundary.clone(),
            probe_rays: self.probe_rays.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: GroupModelDoc = serde_json::from_str(s)?;
        GroupModel::try_from(doc)
    }
}

impl TryFrom<GroupModelDoc> for GroupModel {
    type Error = Error;

    fn try_from(doc: GroupModelDoc) -> Result<Self> {
        let n = doc.n;
        if doc.basis.len() != n || doc.basis.iter().any(|m| m.len() != n * n) {
            return Err(Error::InvalidModel(format!("basis must hold {n} row-major {n}x{n} matrices")));
        }
        let basis = doc.basis.iter().map(|m| Mat::from_row_slice(n, n, m)).collect();
        let extras = ModelExtras {
            sign_functions: doc.sign_functions,
            exp_domain: doc.exp_domain,
            exact_boundary: doc.exact_boundary,
            probe_rays: doc.probe_rays,
        };
        let model = GroupModel::new(&doc.name, basis, doc.orbits, extras)?;
        if !doc.structure_constants.is_empty() {
            let d = 2 * n;
            let mut given = vec![0.0; d * d * d];
            for &(i, j, k, v) in &doc.structure_constants {
                if i >= d || j >= d || k >= d {
                    return Err(Error::InvalidModel(format!("structure constant index ({i},{j},{k}) out of range")));
                }
                given[(i * d + j) * d + k] = v;
            }
            let worst = given.iter().zip(&model.structure_constants).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if worst > 1e-9 {
                return Err(Error::InvalidModel(format!(
                    "structure constants disagree with the basis commutators (max deviation {worst:e})"
                )));
            }
        }
        Ok(model)
    }
}

impl From<GroupModel> for GroupModelDoc {
    fn from(m: GroupModel) -> Self {
        m.to_doc()
    }
}

/// Brackets of the basis `{L¹..Lⁿ, e₁..eₙ}` of the full Lie algebra, in affine matrix form.
fn compute_structure_constants(n: usize, dec: &BasisDecomposer) -> Result<Vec<f64>> {
    let d = 2 * n;
    let mut c = vec![0.0; d * d * d];
    let idx = |i: usize, j: usize, k: usize| (i * d + j) * d + k;
    let basis = dec.basis();
    for i in 0..n {
        for j in 0..n {
            let coeffs = dec.decompose(&linalg::commutator(&basis[i], &basis[j]))?;
            for k in 0..n {
                c[idx(i, j, k)] = coeffs[k];
            }
        }
        // [L^i, e_m] = L^i e_m = Σ_l (L^i)_{lm} e_l
        for m in 0..n {
            for l in 0..n {
                let v = basis[i][(l, m)];
                c[idx(i, n + m, n + l)] = v;
                c[idx(n + m, i, n + l)] = -v;
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn diagonal_products() {
        let g1 =
            GroupElement::new(Vector::from_vec(vec![1.0, 0.0]), Mat::from_diagonal(&Vector::from_vec(vec![2.0, 1.0])))
                .unwrap();
        let g2 =
            GroupElement::new(Vector::from_vec(vec![1.0, 1.0]), Mat::from_diagonal(&Vector::from_vec(vec![1.0, 3.0])))
                .unwrap();
        let p = multiply(&g1, &g2);
        assert_eq!(p.b.as_slice(), &[3.0, 1.0]);
        assert_eq!(p.h, Mat::from_diagonal(&Vector::from_vec(vec![2.0, 3.0])));
        let inv = inverse(&g1).unwrap();
        assert_eq!(inv.b.as_slice(), &[-0.5, 0.0]);
        assert_eq!(inv.h, Mat::from_diagonal(&Vector::from_vec(vec![0.5, 1.0])));
    }

    #[test]
    fn singular_element_rejected() {
        assert!(GroupElement::new(Vector::zeros(2), Mat::zeros(2, 2)).is_err());
    }

    #[test]
    fn identity_values() {
        for entry in catalog::all() {
            let m = &entry.model;
            let e = GroupElement::identity(m.n);
            assert!((m.adjoint_matrix_g(&e).unwrap() - Mat::identity(2 * m.n, 2 * m.n)).abs().max() < 1e-14);
            let (dg, dh) = m.modular_functions(&e).unwrap();
            assert!((dg - 1.0).abs() < 1e-14 && (dh - 1.0).abs() < 1e-14);
            assert!((m.haar_density_h(&vec![0.0; m.n]).unwrap() - 1.0).abs() < 1e-14);
            assert!((m.haar_density_g(&LieAlgebraElement::zero(m.n)).unwrap() - 1.0).abs() < 1e-14);
            let x0 = m.exp_map(&LieAlgebraElement::zero(m.n)).unwrap();
            assert_eq!(x0, e);
        }
    }

    #[test]
    fn structure_constants_from_affine_brackets() {
        for entry in catalog::all() {
            let m = &entry.model;
            let n = m.n;
            let unit = |i: usize| {
                let mut v = vec![0.0; 2 * n];
                v[i] = 1.0;
                m.algebra_matrix(&LieAlgebraElement::from_slice(&v))
            };
            for i in 0..2 * n {
                for j in 0..2 * n {
                    let br = linalg::commutator(&unit(i), &unit(j));
                    let coords = m.algebra_coords(&br).unwrap().to_vec();
                    for (k, c) in coords.iter().enumerate() {
                        assert!((c - m.c(i, j, k)).abs() < 1e-12, "{} c[{i}{j}{k}]", m.name);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for entry in catalog::all() {
            let s = entry.model.to_json().unwrap();
            let back = GroupModel::from_json(&s).unwrap();
            assert_eq!(back.name, entry.model.name);
            assert_eq!(back.h_basis, entry.model.h_basis);
            assert_eq!(back.orbits, entry.model.orbits);
        }
    }

    #[test]
    fn json_rejects_inconsistent_constants() {
        let entry = catalog::make_hc(2.0).unwrap();
        let mut doc = entry.model.to_doc();
        doc.structure_constants[0].3 += 1.0;
        let s = serde_json::to_string(&doc).unwrap();
        assert!(matches!(GroupModel::from_json(&s), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn exp_domain_ball_and_bounds() {
        let d = ExpDomain {
            bounds: vec![CoordinateBound { coord: 1, lower: Some(-1.0), upper: Some(1.0) }],
            half_spaces: vec![HalfSpace { normal: vec![1.0, 0.0, 0.0], offset: 5.0 }],
            balls: vec![Ball { coords: vec![1, 2], radius: 2.0 }],
        };
        assert!(d.contains(&[0.0, 0.5, 1.0]));
        assert!(!d.contains(&[0.0, 1.5, 0.0]));
        assert!(!d.contains(&[0.0, 0.9, 1.9]));
        assert!(!d.contains(&[6.0, 0.0, 0.0]));
        assert_eq!(d.coordinate_range(1), (-1.0, 1.0));
        assert_eq!(d.coordinate_range(2), (-2.0, 2.0));
        assert_eq!(d.coordinate_range(0), (f64::NEG_INFINITY, f64::INFINITY));
    }
}
