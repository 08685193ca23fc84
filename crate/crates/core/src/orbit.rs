//! Open free orbits of `H` in the dual space: the Δ polynomial, classification,
//! the Θ matrix, orbit densities, the maps κ and κ̃, and boundary geometry probes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CoadjointPoint, ExactBoundary, GroupElement, GroupModel};
use crate::linalg::{self, Mat, Vector};

/// Relative tolerance of the Δ boundary test.
pub const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitDescriptor {
    pub label: usize,
    #[serde(default)]
    pub name: String,
    /// Representative `k_j`, normalized so that `|Δ(k_j)| = 1`.
    pub representative: Vec<f64>,
    /// Signs of the model's sign functions on this orbit.
    #[serde(default)]
    pub sign_signature: Vec<i8>,
    #[serde(default)]
    pub is_dihedral_cone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Orbit(usize),
    Boundary,
}

/// Determinant of a row-major `n×n` matrix held in a scratch slice (destroyed).
fn small_det(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        let p = a[piv * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
    }
    det
}

/// `Δ(ω) = det[ωᵀL¹; …; ωᵀLⁿ]` for a slice.
pub fn delta_slice(omega: &[f64], model: &GroupModel) -> f64 {
    let n = model.n;
    let mut buf = [0.0f64; 64];
    let t: &mut [f64] =
        if n <= 8 { &mut buf[..n * n] } else { return delta(&Vector::from_column_slice(omega), model) };
    for (i, l) in model.h_basis.iter().enumerate() {
        for j in 0..n {
            t[i * n + j] = (0..n).map(|k| omega[k] * l[(k, j)]).sum();
        }
    }
    small_det(t, n)
}

/// `Δ(ω)`: determinant of the matrix with rows `ωᵀLⁱ`.
pub fn delta(omega: &Vector, model: &GroupModel) -> f64 {
    if model.n <= 8 {
        return delta_slice(omega.as_slice(), model);
    }
    linalg::det(&tangent_rows(omega, model))
}

fn tangent_rows(gamma_p: &Vector, model: &GroupModel) -> Mat {
    let n = model.n;
    let mut t = Mat::zeros(n, n);
    for (i, l) in model.h_basis.iter().enumerate() {
        t.set_row(i, &l.tr_mul(gamma_p).transpose());
    }
    t
}

fn boundary_scale(omega: &[f64], n: usize) -> f64 {
    let norm = omega.iter().map(|v| v * v).sum::<f64>().sqrt();
    BOUNDARY_TOL * (1.0 + norm.powi(n as i32))
}

pub fn is_boundary(omega: &[f64], model: &GroupModel) -> bool {
    delta_slice(omega, model).abs() < boundary_scale(omega, model.n)
}

/// Orbit label of `ω`, or `None` on the boundary or for unlisted regions.
pub fn classify_label(omega: &[f64], model: &GroupModel) -> Option<usize> {
    match classify_slice(omega, model) {
        Ok(Classification::Orbit(l)) => Some(l),
        _ => None,
    }
}

fn classify_slice(omega: &[f64], model: &GroupModel) -> Result<Classification> {
    if is_boundary(omega, model) {
        return Ok(Classification::Boundary);
    }
    let mut found = None;
    for o in &model.orbits {
        let ok = model.sign_functions.iter().zip(&o.sign_signature).all(|(p, &s)| (p.eval(omega) >= 0.0) == (s > 0));
        if ok {
            found = Some(o.label);
            break;
        }
    }
    found.map(Classification::Orbit).ok_or_else(|| Error::UnclassifiablePoint(omega.to_vec()))
}

/// Orbit containing `ω`, or `Boundary` when `|Δ(ω)| < 1e-10·(1 + ‖ω‖ⁿ)`.
pub fn classify_point(omega: &Vector, model: &GroupModel) -> Result<Classification> {
    classify_slice(omega.as_slice(), model)
}

/// Matrix with rows `γ_pᵀLⁱ`; fails on the orbit boundary.
pub fn tangent_matrix(gamma_p: &Vector, model: &GroupModel) -> Result<Mat> {
    if is_boundary(gamma_p.as_slice(), model) {
        return Err(Error::DegeneratePoint(format!("γ_p = {:?} lies on the orbit boundary", gamma_p.as_slice())));
    }
    Ok(tangent_rows(gamma_p, model))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    pub point: CoadjointPoint,
    pub matrix: Mat,
}

/// `Θ^{ij} = Σ_k c^{ij}_k γ^k`.
pub fn theta_matrix(p: &CoadjointPoint, model: &GroupModel) -> ThetaMatrix {
    let d = 2 * model.n;
    let gamma: Vec<f64> = p.to_vec();
    let matrix = Mat::from_fn(d, d, |i, j| (0..d).map(|k| model.c(i, j, k) * gamma[k]).sum());
    ThetaMatrix { point: p.clone(), matrix }
}

/// `σ(γ) = |det Θ(γ)|^{1/2}`.
pub fn sigma_density(p: &CoadjointPoint, model: &GroupModel) -> Result<f64> {
    let theta = theta_matrix(p, model);
    let d = linalg::det(&theta.matrix);
    let scale = boundary_scale(p.gamma_p.as_slice(), model.n).powi(2);
    if d.abs() < scale {
        return Err(Error::DegeneratePoint(format!("det Θ = {d:e} at γ = {:?}", p.to_vec())));
    }
    if d < -1e-9 * d.abs().max(1.0) {
        return Err(Error::DegeneratePoint(format!("det Θ = {d:e} is negative")));
    }
    Ok(d.abs().sqrt())
}

/// `|det T(γ_p)|`, the same density computed from the tangent frame.
pub fn sigma_from_tangent(gamma_p: &Vector, model: &GroupModel) -> Result<f64> {
    Ok(linalg::det(&tangent_matrix(gamma_p, model)?).abs())
}

/// `1/|Δ(γ_p)|`, equal to `c_j(γ_p)` on every orbit because `|Δ(k_j)| = 1`.
pub fn c_from_delta(gamma_p: &[f64], model: &GroupModel) -> f64 {
    1.0 / delta_slice(gamma_p, model).abs()
}

/// Solves `γ_pᵀ·h = k_jᵀ` for `h ∈ H`, i.e. `γ_pᵀ = k_jᵀh⁻¹`.
///
/// Damped Newton iteration in the group, `h ← h·exp(Σ δ_i Lⁱ)`.
pub fn kappa(gamma_p: &Vector, orbit: &OrbitDescriptor, model: &GroupModel) -> Result<Mat> {
    match classify_point(gamma_p, model) {
        Ok(Classification::Orbit(l)) if l == orbit.label => {}
        other => {
            return Err(Error::NoSolution(format!(
                "γ_p = {:?} is not on orbit {} ({other:?})",
                gamma_p.as_slice(),
                orbit.label
            )))
        }
    }
    let n = model.n;
    let k = Vector::from_column_slice(&orbit.representative);
    let target = 1e-14 * (1.0 + k.norm());
    let mut h = Mat::identity(n, n);
    for _ in 0..400 {
        let omega = h.tr_mul(gamma_p);
        let r = &k - &omega;
        if r.norm() <= target {
            return Ok(h);
        }
        let jac = tangent_rows(&omega, model).transpose();
        let mut delta = jac.lu().solve(&r).ok_or_else(|| Error::NoSolution("singular Newton step in κ".into()))?;
        let step = delta.amax();
        if step > 1.0 {
            delta /= step;
        }
        h = &h * linalg::matrix_exp(&model.x_q_matrix(delta.as_slice()))?;
    }
    Err(Error::NoSolution(format!("κ iteration did not converge at γ_p = {:?}", gamma_p.as_slice())))
}

/// `c_j(γ_p) = |det κ(γ_p)| / Δ_H(κ(γ_p))`.
pub fn duflo_moore_density(gamma_p: &Vector, orbit: &OrbitDescriptor, model: &GroupModel) -> Result<f64> {
    let h = kappa(gamma_p, orbit, model)?;
    let (_, delta_h) = model.modular_functions(&GroupElement { b: Vector::zeros(model.n), h: h.clone() })?;
    Ok(linalg::det(&h).abs() / delta_h)
}

/// Orbit of `p`, using its label when present.
pub fn orbit_of<'a>(p: &CoadjointPoint, model: &'a GroupModel) -> Result<&'a OrbitDescriptor> {
    let label = match p.orbit_label {
        Some(l) => l,
        None => match classify_point(&p.gamma_p, model)? {
            Classification::Orbit(l) => l,
            Classification::Boundary => {
                return Err(Error::DegeneratePoint(format!("γ_p = {:?} is on the boundary", p.gamma_p.as_slice())))
            }
        },
    };
    model.orbits.get(label).ok_or_else(|| Error::InvalidParameter(format!("orbit label {label} out of range")))
}

/// `κ̃(γ) = (T(γ_p)⁻¹γ_q, κ(γ_p))`, intertwining the coadjoint action with left translation.
pub fn kappa_tilde(p: &CoadjointPoint, model: &GroupModel) -> Result<GroupElement> {
    let orbit = orbit_of(p, model)?;
    let h = kappa(&p.gamma_p, orbit, model)?;
    let t = tangent_matrix(&p.gamma_p, model)?;
    let b = t.lu().solve(&p.gamma_q).ok_or_else(|| Error::DegeneratePoint("tangent matrix is singular".into()))?;
    Ok(GroupElement { b, h })
}

/// Random point `γ = (γ_q, k_j·h⁻¹)` of orbit `label`, `h = exp(X_q)` with `X_q` in the ball of radius `scale`.
pub fn sample_orbit_point<R: Rng>(model: &GroupModel, label: usize, rng: &mut R, scale: f64) -> Result<CoadjointPoint> {
    let o =
        model.orbits.get(label).ok_or_else(|| Error::InvalidParameter(format!("orbit label {label} out of range")))?;
    let h = linalg::matrix_exp(&model.x_q_matrix(model.sample_x_q(rng, scale).as_slice()))?;
    let gamma_p = linalg::inverse_guarded(&h, "orbit sample")?.tr_mul(&Vector::from_column_slice(&o.representative));
    let gamma_q = Vector::from_iterator(model.n, (0..model.n).map(|_| rng.gen_range(-2.0..2.0)));
    Ok(CoadjointPoint { gamma_q, gamma_p, orbit_label: Some(label) })
}

/// The four orbit densities that coincide at a point of an open orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEqualities {
    pub c_inv: f64,
    pub tangent: f64,
    pub theta: f64,
    pub modular: f64,
    /// `(max − min) / max` over the four values.
    pub spread: f64,
}

/// `c⁻¹`, `|det T|`, `|det Θ|^{1/2}` and `Δ_G(κ̃)` at `p`.
pub fn measure_equalities(p: &CoadjointPoint, model: &GroupModel) -> Result<MeasureEqualities> {
    let o = orbit_of(p, model)?;
    let c_inv = 1.0 / duflo_moore_density(&p.gamma_p, o, model)?;
    let tangent = sigma_from_tangent(&p.gamma_p, model)?;
    let theta = sigma_density(p, model)?;
    let (modular, _) = model.modular_functions(&kappa_tilde(p, model)?)?;
    let v = [c_inv, tangent, theta, modular];
    let hi = v.iter().copied().fold(f64::MIN, f64::max);
    let lo = v.iter().copied().fold(f64::MAX, f64::min);
    Ok(MeasureEqualities { c_inv, tangent, theta, modular, spread: (hi - lo) / hi })
}

/// Result of the hyperplane-arrangement test on an orbit boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DihedralReport {
    pub orbit: usize,
    pub is_dihedral_cone: bool,
    /// `"exact"` when the model carries a factorization, otherwise `"sampling"`.
    pub source: String,
    pub hyperplanes: Vec<Vec<f64>>,
    pub witness: Option<Vec<f64>>,
    pub sampling: SamplingVerdict,
    /// Whether the sampling verdict matches the exact one (always true without an exact form).
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingVerdict {
    pub is_dihedral_cone: bool,
    pub boundary_points: usize,
    pub hyperplanes: Vec<Vec<f64>>,
    pub witness: Option<Vec<f64>>,
}

fn random_in_orbit(rng: &mut ChaCha8Rng, orbit: usize, model: &GroupModel, radius: f64) -> Option<Vec<f64>> {
    for _ in 0..10_000 {
        let w: Vec<f64> = (0..model.n).map(|_| rng.gen_range(-radius..radius)).collect();
        if classify_label(&w, model) == Some(orbit) {
            return Some(w);
        }
    }
    None
}

fn sample_boundary(orbit: usize, model: &GroupModel, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 3.0;
    let mut points = Vec::new();
    let attempts = samples * 50;
    for _ in 0..attempts {
        if points.len() >= samples {
            break;
        }
        let Some(a) = random_in_orbit(&mut rng, orbit, model, radius) else { break };
        let b: Vec<f64> = (0..model.n).map(|_| rng.gen_range(-radius..radius)).collect();
        if classify_label(&b, model) == Some(orbit) {
            continue;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        let at = |t: f64| a.iter().zip(&b).map(|(x, y)| x + t * (y - x)).collect::<Vec<f64>>();
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if classify_label(&at(mid), model) == Some(orbit) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = at(0.5 * (lo + hi));
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.5 {
            points.push(p.iter().map(|v| v / norm).collect());
        }
    }
    points
}

/// Unit normal of the hyperplane through the origin and the given points.
fn plane_through(points: &[&Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let mut m = Mat::zeros(n, n);
    for (i, p) in points.iter().enumerate() {
        for j in 0..n {
            m[(i, j)] = p[j];
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t?;
    let (idx, _) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let mut sorted: Vec<f64> = svd.singular_values.iter().copied().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if n >= 2 && sorted.len() >= 2 && sorted[1] < 1e-6 {
        return None;
    }
    Some(vt.row(idx).iter().copied().collect())
}

/// Inlier distance for boundary samples; double roots of Δ leave them only ~1e-5 from the plane.
const PLANE_TOL: f64 = 1e-4;

fn ransac_planes(points: &[Vec<f64>], n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut remaining: Vec<Vec<f64>> = points.to_vec();
    let mut planes = Vec::new();
    let min_support = n.max(points.len() / 20);
    'outer: while !remaining.is_empty() {
        if remaining.len() < n.saturating_sub(1).max(1) {
            break;
        }
        for _ in 0..400 {
            let chosen: Vec<&Vec<f64>> = remaining.choose_multiple(&mut rng, n - 1).collect();
            let normal = if n == 1 { Some(vec![1.0]) } else { plane_through(&chosen, n) };
            let Some(normal) = normal else { continue };
            let inliers = remaining
                .iter()
                .filter(|p| p.iter().zip(&normal).map(|(a, b)| a * b).sum::<f64>().abs() < PLANE_TOL)
                .count();
            if inliers >= min_support {
                remaining.retain(|p| p.iter().zip(&normal).map(|(a, b)| a * b).sum::<f64>().abs() >= PLANE_TOL);
                planes.push(normal);
                continue 'outer;
            }
        }
        break;
    }
    (planes, remaining)
}

/// Sampling-based hyperplane test on the boundary of an orbit.
pub fn sample_dihedral(
    orbit: &OrbitDescriptor,
    model: &GroupModel,
    samples: usize,
    seed: u64,
) -> Result<SamplingVerdict> {
    let points = sample_boundary(orbit.label, model, samples, seed);
    if points.is_empty() {
        // Only the origin separates this orbit from the rest: degenerate arrangement.
        return Ok(SamplingVerdict { is_dihedral_cone: true, boundary_points: 0, hyperplanes: vec![], witness: None });
    }
    if points.len() < model.n {
        return Err(Error::InconclusiveGeometry(format!(
            "only {} boundary samples found for orbit {}",
            points.len(),
            orbit.label
        )));
    }
    let (planes, rest) = ransac_planes(&points, model.n, seed);
    Ok(SamplingVerdict {
        is_dihedral_cone: rest.is_empty(),
        boundary_points: points.len(),
        hyperplanes: planes,
        witness: rest.first().cloned(),
    })
}

/// Decides whether the boundary of `orbit` is a union of hyperplanes.
///
/// The model's exact factorization, when present, is authoritative and the
/// sampling verdict is reported as a cross-check.
pub fn check_dihedral_cone(
    orbit: &OrbitDescriptor,
    model: &GroupModel,
    samples: usize,
    seed: u64,
) -> Result<DihedralReport> {
    let sampling = sample_dihedral(orbit, model, samples, seed)?;
    let report = match &model.exact_boundary {
        Some(ExactBoundary::Hyperplanes { normals }) => DihedralReport {
            orbit: orbit.label,
            is_dihedral_cone: true,
            source: "exact".into(),
            hyperplanes: normals.clone(),
            witness: None,
            agrees: sampling.is_dihedral_cone,
            sampling,
        },
        Some(ExactBoundary::Origin) => DihedralReport {
            orbit: orbit.label,
            is_dihedral_cone: true,
            source: "exact".into(),
            hyperplanes: vec![],
            witness: None,
            agrees: sampling.is_dihedral_cone,
            sampling,
        },
        Some(ExactBoundary::NonPlanar { .. }) => DihedralReport {
            orbit: orbit.label,
            is_dihedral_cone: false,
            source: "exact".into(),
            hyperplanes: sampling.hyperplanes.clone(),
            witness: sampling.witness.clone(),
            agrees: !sampling.is_dihedral_cone,
            sampling,
        },
        None => DihedralReport {
            orbit: orbit.label,
            is_dihedral_cone: sampling.is_dihedral_cone,
            source: "sampling".into(),
            hyperplanes: sampling.hyperplanes.clone(),
            witness: sampling.witness.clone(),
            agrees: true,
            sampling,
        },
    };
    Ok(report)
}

/// An on-orbit point moved to a different open orbit by `sinch(X_q)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingWitness {
    pub omega: Vec<f64>,
    pub x_q: Vec<f64>,
    pub image: Vec<f64>,
    pub to_orbit: usize,
}

/// Sign change of `Δ(ω sinch(t·ray))` along a ray.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RaySweep {
    pub omega: Vec<f64>,
    pub ray: Vec<f64>,
    pub t_max: f64,
    pub crossing_t: Option<f64>,
    pub to_orbit: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingReport {
    pub orbit: usize,
    pub trials: usize,
    pub mixing_found: usize,
    pub witnesses: Vec<MixingWitness>,
    pub ray_sweeps: Vec<RaySweep>,
}

/// `ωᵀ·sinch(X_q)` for `X_q = Σ x_i Lⁱ`.
pub fn sinch_image(omega: &[f64], x_q: &[f64], model: &GroupModel) -> Result<Vec<f64>> {
    let s = linalg::sinch(&model.x_q_matrix(x_q), &model.series)?;
    Ok(s.tr_mul(&Vector::from_column_slice(omega)).iter().copied().collect())
}

/// `Δ(ωᵀ·sinch(t·ray))`.
pub fn delta_along_ray(omega: &[f64], ray: &[f64], t: f64, model: &GroupModel) -> Result<f64> {
    let x: Vec<f64> = ray.iter().map(|r| r * t).collect();
    Ok(delta_slice(&sinch_image(omega, &x, model)?, model))
}

fn sweep(omega: &[f64], ray: &[f64], t_max: f64, model: &GroupModel) -> Result<RaySweep> {
    let steps = 1000;
    let d0 = delta_slice(omega, model);
    let mut prev_t = 0.0;
    let mut crossing = None;
    for i in 1..=steps {
        let t = t_max * i as f64 / steps as f64;
        let d = delta_along_ray(omega, ray, t, model)?;
        if d.signum() != d0.signum() && d != 0.0 {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if delta_along_ray(omega, ray, mid, model)?.signum() == d0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossing = Some(0.5 * (lo + hi));
            break;
        }
        prev_t = t;
    }
    let to_orbit = match crossing {
        Some(tc) => {
            let x: Vec<f64> = ray.iter().map(|r| r * (tc * 1.01 + 1e-6)).collect();
            classify_label(&sinch_image(omega, &x, model)?, model)
        }
        None => None,
    };
    Ok(RaySweep { omega: omega.to_vec(), ray: ray.to_vec(), t_max, crossing_t: crossing, to_orbit })
}

/// Looks for `(ω, X_q)` with `ω` on `orbit` and `ωᵀ·sinch(X_q)` on another open orbit.
///
/// Random trials draw `ω` uniformly from the orbit inside `[−2, 2]ⁿ` and `X_q`
/// from the unit ball; each rayon chunk has its own seeded stream. The model's
/// probe rays are swept from the representative and a few random orbit points.
pub fn sinch_mixing_probe(
    orbit: &OrbitDescriptor,
    model: &GroupModel,
    trials: usize,
    seed: u64,
) -> Result<MixingReport> {
    const CHUNK: usize = 1024;
    let chunks = trials.div_ceil(CHUNK);
    let results: Vec<Result<(usize, Vec<MixingWitness>)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut found = 0;
            let mut witnesses = Vec::new();
            for _ in 0..count {
                let Some(omega) = random_in_orbit(&mut rng, orbit.label, model, 2.0) else { break };
                let x_q = loop {
                    let v: Vec<f64> = (0..model.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    if v.iter().map(|a| a * a).sum::<f64>() < 1.0 {
                        break v;
                    }
                };
                let image = sinch_image(&omega, &x_q, model)?;
                if let Some(l) = classify_label(&image, model) {
                    if l != orbit.label {
                        found += 1;
                        if witnesses.len() < 8 {
                            witnesses.push(MixingWitness { omega: omega.clone(), x_q, image, to_orbit: l });
                        }
                    }
                }
            }
            Ok((found, witnesses))
        })
        .collect();
    let mut mixing_found = 0;
    let mut witnesses = Vec::new();
    for r in results {
        let (f, w) = r?;
        mixing_found += f;
        witnesses.extend(w);
    }
    witnesses.truncate(16);

    let mut ray_sweeps = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bases = vec![orbit.representative.clone()];
    for _ in 0..8 {
        if let Some(w) = random_in_orbit(&mut rng, orbit.label, model, 2.0) {
            bases.push(w);
        }
    }
    for ray in &model.probe_rays {
        for base in &bases {
            ray_sweeps.push(sweep(base, ray, 10.0, model)?);
        }
    }
    Ok(MixingReport { orbit: orbit.label, trials, mixing_found, witnesses, ray_sweeps })
}
