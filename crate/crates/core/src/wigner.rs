//! Wigner function on a coadjoint orbit of `ℝⁿ ⋊ H`.
//!
//! ```text
//! W(φ,ψ|γ) = (2π)^{−n/2} ∫ e^{iγ_q·x} conj(ψ(γ_p E₊)) φ(γ_p E₋)
//!            |Δ(γ_p S⁻¹)|^{1/2} |Δ(γ_p)|^{1/2} |det sinch(ad X/2) / det S|^{1/2} dx
//! ```
//!
//! with `X = X_q(x)`, `E₊ = e^{X/2} sinch(X/2)⁻¹ = F(−X)⁻¹`, `E₋ = F(X)⁻¹`,
//! `S = sinch(X/2)` and `S⁻¹ = E₊e^{−X/2}`. Row vectors act on the left of matrices.
//! With this normalization
//!
//! * `W(Ûφ, Ûψ | γ) = W(φ, ψ | coAd_{g⁻¹}γ)`,
//! * `∫ conj(W₁)·W₂·σ⁻¹ dγ = ⟨φ₁|φ₂⟩⟨ψ₂|ψ₁⟩` with `σ = |Δ(γ_p)|`,
//! * `∫ W(γ)·c(γ_p) dγ_q = (2π)^{n/2}·conj(ψ(γ_p))·φ(γ_p)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::group::{CoadjointPoint, GroupElement, GroupModel};
use crate::linalg::{self, Mat, Vector};
use crate::orbit::{self, OrbitDescriptor};
use crate::quadrature::{QuadratureSpec, TensorRule, MAX_DOUBLINGS};
use crate::representation::{inner_product, rep_apply, OrbitFunction};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform axis `min, min + step, …, max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let ok = min.is_finite() && max.is_finite() && count >= 1 && (min < max || (count == 1 && min == max));
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid axis [{min}, {max}] with {count} nodes")));
        }
        Ok(Self { min, max, count })
    }

    pub fn point(v: f64) -> Self {
        Self { min: v, max: v, count: 1 }
    }

    /// Node spacing, or 1 for a single-node axis.
    pub fn step(&self) -> f64 {
        if self.count == 1 {
            1.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.min
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }
}

fn axes_len(axes: &[Axis]) -> usize {
    axes.iter().map(|a| a.count).product()
}

/// Coordinates of flat index `idx` on a tensor grid of axes, last axis fastest.
fn axes_point(axes: &[Axis], mut idx: usize) -> Vec<f64> {
    let mut out = vec![0.0; axes.len()];
    for d in (0..axes.len()).rev() {
        out[d] = axes[d].node(idx % axes[d].count);
        idx /= axes[d].count;
    }
    out
}

/// Evaluation lattice on `𝒪* = T*𝒪̂`: uniform `γ_q` axes times `γ_p` axes masked to the orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub orbit: OrbitDescriptor,
    pub gamma_q_axes: Vec<Axis>,
    pub gamma_p_axes: Vec<Axis>,
    /// One flag per `γ_p` node: true when the node lies in the orbit.
    pub mask: Vec<bool>,
}

impl PhaseSpaceGrid {
    pub fn new(model: &GroupModel, orbit: usize, gamma_q_axes: Vec<Axis>, gamma_p_axes: Vec<Axis>) -> Result<Self> {
        let orbit = model
            .orbits
            .get(orbit)
            .cloned()
            .ok_or_else(|| Error::InvalidParameter(format!("group '{}' has no orbit {orbit}", model.name)))?;
        if gamma_q_axes.len() != model.n || gamma_p_axes.len() != model.n {
            return Err(Error::InvalidParameter(format!("grid needs {} γ_q and {} γ_p axes", model.n, model.n)));
        }
        let mask: Vec<bool> = (0..axes_len(&gamma_p_axes))
            .map(|i| orbit::classify_label(&axes_point(&gamma_p_axes, i), model) == Some(orbit.label))
            .collect();
        if !mask.iter().any(|&m| m) {
            return Err(Error::InvalidParameter(format!(
                "no γ_p grid node classifies into orbit {} ({}) of '{}'",
                orbit.label, orbit.name, model.name
            )));
        }
        Ok(Self { orbit, gamma_q_axes, gamma_p_axes, mask })
    }

    /// `γ_q ∈ [−g, g]ⁿ` with `q_count` nodes per axis and `γ_p` on the box `[lo, hi]` with `p_count` nodes.
    pub fn uniform(
        model: &GroupModel,
        orbit: usize,
        g: f64,
        q_count: usize,
        lo: &[f64],
        hi: &[f64],
        p_count: usize,
    ) -> Result<Self> {
        let q = (0..model.n).map(|_| Axis::new(-g, g, q_count)).collect::<Result<Vec<_>>>()?;
        let p = lo.iter().zip(hi).map(|(a, b)| Axis::new(*a, *b, p_count)).collect::<Result<Vec<_>>>()?;
        Self::new(model, orbit, q, p)
    }

    pub fn n(&self) -> usize {
        self.gamma_q_axes.len()
    }

    pub fn q_len(&self) -> usize {
        axes_len(&self.gamma_q_axes)
    }

    pub fn p_len(&self) -> usize {
        axes_len(&self.gamma_p_axes)
    }

    pub fn q_point(&self, i: usize) -> Vec<f64> {
        axes_point(&self.gamma_q_axes, i)
    }

    pub fn p_point(&self, i: usize) -> Vec<f64> {
        axes_point(&self.gamma_p_axes, i)
    }

    pub fn q_cell(&self) -> f64 {
        self.gamma_q_axes.iter().map(Axis::step).product()
    }

    pub fn p_cell(&self) -> f64 {
        self.gamma_p_axes.iter().map(Axis::step).product()
    }

    /// Full point for node `(p_idx, q_idx)`.
    pub fn point(&self, p_idx: usize, q_idx: usize) -> CoadjointPoint {
        CoadjointPoint {
            gamma_q: Vector::from_vec(self.q_point(q_idx)),
            gamma_p: Vector::from_vec(self.p_point(p_idx)),
            orbit_label: Some(self.orbit.label),
        }
    }

    pub fn same_geometry(&self, other: &PhaseSpaceGrid) -> bool {
        self.gamma_q_axes == other.gamma_q_axes
            && self.gamma_p_axes == other.gamma_p_axes
            && self.orbit.label == other.orbit.label
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalInfo {
    pub id: String,
    /// SHA-256 over the description and a fixed set of samples.
    pub sha256: String,
}

impl SignalInfo {
    pub fn of(f: &OrbitFunction) -> Self {
        Self { id: f.id.clone(), sha256: signal_hash(f) }
    }
}

/// Hash of a signal's id and its values on a 5ⁿ lattice over the support box.
pub fn signal_hash(f: &OrbitFunction) -> String {
    let mut h = Sha256::new();
    h.update(f.model.name.as_bytes());
    h.update((f.orbit.label as u64).to_le_bytes());
    h.update(f.id.as_bytes());
    let axes: Vec<Axis> =
        f.support_hint.lo.iter().zip(&f.support_hint.hi).map(|(a, b)| Axis { min: *a, max: *b, count: 5 }).collect();
    for i in 0..axes_len(&axes) {
        let v = f.evaluate(&axes_point(&axes, i));
        h.update(v.re.to_le_bytes());
        h.update(v.im.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerMeta {
    pub group: String,
    pub orbit: usize,
    pub quadrature: QuadratureSpec,
    pub phi: SignalInfo,
    pub psi: SignalInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    /// Largest integrand magnitude near free box faces relative to the bulk.
    pub tail_ratio: f64,
    /// Number of `γ_p` nodes where a warped argument left the orbit.
    pub mixing_nodes: usize,
}

/// Wigner values on a phase-space grid; `values[p * q_len + q]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WignerGrid {
    pub grid: PhaseSpaceGrid,
    pub values: Vec<Complex64>,
    /// Per `γ_p` node: warped arguments left the orbit.
    pub mixing: Vec<bool>,
    pub meta: WignerMeta,
    #[serde(skip)]
    pub signals: Option<(OrbitFunction, OrbitFunction)>,
}

impl WignerGrid {
    pub fn value(&self, p_idx: usize, q_idx: usize) -> Complex64 {
        self.values[p_idx * self.grid.q_len() + q_idx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Σ |W|²·σ⁻¹·cell` over unmasked nodes.
    pub fn grid_norm_sq(&self, model: &GroupModel) -> f64 {
        overlap_sum(self, self, model).re
    }
}

/// Per-node data of the `x_q` quadrature: warps and the signal-independent weight.
#[derive(Debug, Clone)]
struct XNode {
    x: Vec<f64>,
    /// Quadrature weight × `|det sinch(ad X/2)/det S|^{1/2}`.
    weight: f64,
    e_plus: Mat,
    e_minus: Mat,
    s_inv: Mat,
}

fn x_node(model: &GroupModel, x: &[f64], w: f64) -> Result<Option<XNode>> {
    if !model.in_exp_domain(x) || w == 0.0 {
        return Ok(None);
    }
    let xq = model.x_q_matrix(x);
    let e_plus = linalg::f_minus_inverse(&xq, &model.series)?;
    let e_minus = linalg::f_minus_inverse(&-&xq, &model.series)?;
    let half = &xq * 0.5;
    let s_inv = &e_plus * linalg::matrix_exp(&-&half)?;
    let s = linalg::sinch(&half, &model.series)?;
    let ad = model.ad(x)?;
    let s_ad = linalg::sinch(&(ad * 0.5), &model.series)?;
    let geo = (linalg::det(&s_ad) / linalg::det(&s)).abs().sqrt();
    Ok(Some(XNode { x: x.to_vec(), weight: w * geo, e_plus, e_minus, s_inv }))
}

/// Precomputed warps for one quadrature rule.
pub struct WignerKernel {
    rule: TensorRule,
    nodes: Vec<Option<XNode>>,
    pub quad: QuadratureSpec,
}

impl WignerKernel {
    pub fn new(model: &GroupModel, quad: &QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        if quad.dim() != model.n {
            return Err(Error::InvalidParameter("quadrature dimension does not match the group".into()));
        }
        let rule = quad.tensor();
        let nodes = (0..rule.len())
            .into_par_iter()
            .map(|i| {
                let mut x = vec![0.0; model.n];
                let w = rule.node(i, &mut x);
                x_node(model, &x, w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rule, nodes, quad: quad.clone() })
    }

    /// Weighted integrand `A_j` at every node for fixed `γ_p`; returns the mixing flag.
    fn integrand(&self, phi: &OrbitFunction, psi: &OrbitFunction, gamma_p: &[f64], out: &mut [Complex64]) -> bool {
        let model = &phi.model;
        let n = model.n;
        let own = orbit::classify_label(gamma_p, model);
        let check_mixing = !model.orbits.iter().all(|o| o.is_dihedral_cone);
        let d0 = orbit::delta_slice(gamma_p, model).abs().sqrt();
        let mut mixing = false;
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut s = vec![0.0; n];
        for (slot, node) in out.iter_mut().zip(&self.nodes) {
            *slot = ZERO;
            let Some(node) = node else { continue };
            row_times(gamma_p, &node.e_minus, &mut b);
            row_times(gamma_p, &node.e_plus, &mut a);
            if check_mixing && (orbit::classify_label(&a, model) != own || orbit::classify_label(&b, model) != own) {
                mixing = true;
            }
            let fb = phi.evaluate(&b);
            if fb == ZERO {
                continue;
            }
            let fa = psi.evaluate(&a);
            if fa == ZERO {
                continue;
            }
            row_times(gamma_p, &node.s_inv, &mut s);
            let w = orbit::delta_slice(&s, model).abs().sqrt() * d0 * node.weight;
            *slot = fa.conj() * fb * w;
        }
        mixing
    }

    /// Largest `|A_j|` on nodes within 10% of a free face, relative to the largest `|A_j|`.
    fn tail_ratio(&self, model: &GroupModel, values: &[Complex64]) -> (f64, f64) {
        let free = self.quad.free_faces(&model.exp_domain);
        let (mut tail, mut bulk) = (0.0f64, 0.0f64);
        for (v, node) in values.iter().zip(&self.nodes) {
            let Some(node) = node else { continue };
            let m = v.norm() / node.weight.abs().max(f64::MIN_POSITIVE);
            bulk = bulk.max(m);
            let near = node.x.iter().enumerate().any(|(d, &x)| {
                let (lo, hi) = (self.quad.lower[d], self.quad.upper[d]);
                let margin = 0.1 * (hi - lo);
                (free[d].0 && x < lo + margin) || (free[d].1 && x > hi - margin)
            });
            if near {
                tail = tail.max(m);
            }
        }
        (tail, bulk)
    }

    /// `(2π)^{−n/2} Σ_j A_j e^{iγ_q·x_j}` for every `γ_q` of the grid, by axis-wise contraction.
    fn contract(&self, values: &[Complex64], q_axes: &[Axis]) -> Vec<Complex64> {
        let n = q_axes.len();
        let counts: Vec<usize> = self.rule.axes.iter().map(|a| a.0.len()).collect();
        let mut t = values.to_vec();
        let mut post = 1usize;
        for d in (0..n).rev() {
            let pre: usize = counts[..d].iter().product();
            let m = counts[d];
            let g = q_axes[d].count;
            let xs = &self.rule.axes[d].0;
            let table: Vec<Complex64> = (0..g)
                .flat_map(|gi| {
                    let gamma = q_axes[d].node(gi);
                    xs.iter().map(move |x| Complex64::from_polar(1.0, gamma * x))
                })
                .collect();
            let mut next = vec![ZERO; pre * g * post];
            for p in 0..pre {
                for gi in 0..g {
                    let row = &table[gi * m..(gi + 1) * m];
                    for q in 0..post {
                        let mut acc = ZERO;
                        for (j, ph) in row.iter().enumerate() {
                            acc += t[(p * m + j) * post + q] * ph;
                        }
                        next[(p * g + gi) * post + q] = acc;
                    }
                }
            }
            t = next;
            post *= g;
        }
        let norm = (2.0 * PI).powf(-0.5 * n as f64);
        t.iter().map(|v| v * norm).collect()
    }
}

fn row_times(k: &[f64], m: &Mat, out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (i, ki) in k.iter().enumerate() {
            s += ki * m[(i, j)];
        }
        *o = s;
    }
}

fn check_signals(phi: &OrbitFunction, psi: &OrbitFunction) -> Result<()> {
    if phi.model.name != psi.model.name || phi.model.n != psi.model.n {
        return Err(Error::InvalidParameter("φ and ψ belong to different groups".into()));
    }
    if phi.orbit.label != psi.orbit.label {
        return Err(Error::InvalidParameter("φ and ψ live on different orbits".into()));
    }
    Ok(())
}

/// Picks the integration box by doubling until the integrand tail drops below `rel_tol`.
///
/// The tail is probed at up to 16 of the given `γ_p` points; returns the kernel and final tail ratio.
pub fn adapt_kernel(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    gamma_ps: &[Vec<f64>],
    base: &QuadratureSpec,
) -> Result<(WignerKernel, f64)> {
    let model = &phi.model;
    let stride = (gamma_ps.len() / 16).max(1);
    let probes: Vec<&Vec<f64>> = gamma_ps.iter().step_by(stride).collect();
    let mut quad = base.clone();
    let mut round = 0;
    loop {
        let kernel = WignerKernel::new(model, &quad)?;
        let (tail, bulk) = probes
            .par_iter()
            .map(|gp| {
                let mut buf = vec![ZERO; kernel.nodes.len()];
                kernel.integrand(phi, psi, gp, &mut buf);
                kernel.tail_ratio(model, &buf)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        let ratio = if bulk > 0.0 { tail / bulk } else { 0.0 };
        let grown = quad.scaled(2.0, &model.exp_domain);
        if ratio <= quad.rel_tol || round == MAX_DOUBLINGS || grown == quad {
            return Ok((kernel, ratio));
        }
        quad = grown;
        round += 1;
    }
}

/// Wigner value at one point together with its mixing flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerValue {
    pub value: Complex64,
    pub mixing: bool,
}

/// Direct evaluation at `γ`: warps are recomputed per node and the phase is applied node by node.
pub fn wigner_point(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    gamma: &CoadjointPoint,
    quad: &QuadratureSpec,
) -> Result<WignerValue> {
    check_signals(phi, psi)?;
    let model = phi.model.clone();
    let gp = gamma.gamma_p.as_slice();
    let own = match orbit::classify_label(gp, &model) {
        Some(l) => l,
        None => return Err(Error::DegeneratePoint(format!("γ_p = {gp:?} is not on an open orbit"))),
    };
    if phi.is_zero() || psi.is_zero() {
        return Ok(WignerValue { value: ZERO, mixing: false });
    }
    quad.validate()?;
    let rule = quad.tensor();
    let n = model.n;
    let check_mixing = !model.orbits.iter().all(|o| o.is_dihedral_cone);
    let d0 = orbit::delta_slice(gp, &model).abs().sqrt();
    let chunk = 256;
    let parts = (0..rule.len().div_ceil(chunk))
        .into_par_iter()
        .map(|c| -> Result<(Complex64, bool)> {
            let mut x = vec![0.0; n];
            let (mut s, mut mixing) = (ZERO, false);
            for i in c * chunk..((c + 1) * chunk).min(rule.len()) {
                let w = rule.node(i, &mut x);
                let Some(node) = x_node(&model, &x, w)? else { continue };
                let a = node.e_plus.tr_mul(&gamma.gamma_p);
                let b = node.e_minus.tr_mul(&gamma.gamma_p);
                if check_mixing
                    && (orbit::classify_label(a.as_slice(), &model) != Some(own)
                        || orbit::classify_label(b.as_slice(), &model) != Some(own))
                {
                    mixing = true;
                }
                let f = psi.evaluate(a.as_slice()).conj() * phi.evaluate(b.as_slice());
                if f == ZERO {
                    continue;
                }
                let sv = node.s_inv.tr_mul(&gamma.gamma_p);
                let weight = orbit::delta(&sv, &model).abs().sqrt() * d0 * node.weight;
                let phase = gamma.gamma_q.dot(&Vector::from_column_slice(&x));
                s += f * Complex64::from_polar(weight, phase);
            }
            Ok((s, mixing))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut total, mut mixing) = (ZERO, false);
    for (s, m) in parts {
        total += s;
        mixing |= m;
    }
    Ok(WignerValue { value: total * (2.0 * PI).powf(-0.5 * n as f64), mixing })
}

/// `wigner_point` with the integration box adapted to the signals at `γ_p`.
pub fn wigner_point_adaptive(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    gamma: &CoadjointPoint,
    base: &QuadratureSpec,
) -> Result<WignerValue> {
    let (kernel, _) = adapt_kernel(phi, psi, &[gamma.gamma_p.as_slice().to_vec()], base)?;
    wigner_point(phi, psi, gamma, &kernel.quad)
}

/// Wigner function on every unmasked node of `grid` (fast path).
///
/// The box is adapted once for the whole grid; per `γ_p` node the integrand is sampled on the
/// tensor rule and contracted axis by axis against `e^{iγ_q x}`.
pub fn wigner_grid(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    grid: &PhaseSpaceGrid,
    base: &QuadratureSpec,
) -> Result<WignerGrid> {
    check_signals(phi, psi)?;
    let model = phi.model.clone();
    if grid.n() != model.n {
        return Err(Error::GridMismatch("grid dimension does not match the group".into()));
    }
    let q_len = grid.q_len();
    let active: Vec<usize> = (0..grid.p_len()).filter(|&i| grid.mask[i]).collect();
    let meta_for = |quad: &QuadratureSpec, tail: f64, mixing_nodes: usize| WignerMeta {
        group: model.name.clone(),
        orbit: grid.orbit.label,
        quadrature: quad.clone(),
        phi: SignalInfo::of(phi),
        psi: SignalInfo::of(psi),
        timestamp: None,
        tail_ratio: tail,
        mixing_nodes,
    };
    if phi.is_zero() || psi.is_zero() {
        return Ok(WignerGrid {
            grid: grid.clone(),
            values: vec![ZERO; grid.p_len() * q_len],
            mixing: vec![false; grid.p_len()],
            meta: meta_for(base, 0.0, 0),
            signals: Some((phi.clone(), psi.clone())),
        });
    }
    let points: Vec<Vec<f64>> = active.iter().map(|&i| grid.p_point(i)).collect();
    let (kernel, tail) = adapt_kernel(phi, psi, &points, base)?;
    let rows: Vec<(Vec<Complex64>, bool)> = points
        .par_iter()
        .map(|gp| {
            let mut buf = vec![ZERO; kernel.nodes.len()];
            let mixing = kernel.integrand(phi, psi, gp, &mut buf);
            if buf.iter().all(|v| *v == ZERO) {
                return (vec![ZERO; q_len], mixing);
            }
            (kernel.contract(&buf, &grid.gamma_q_axes), mixing)
        })
        .collect();
    let mut values = vec![ZERO; grid.p_len() * q_len];
    let mut mixing = vec![false; grid.p_len()];
    for (&p, (row, m)) in active.iter().zip(rows) {
        values[p * q_len..(p + 1) * q_len].copy_from_slice(&row);
        mixing[p] = m;
    }
    let mixing_nodes = mixing.iter().filter(|&&m| m).count();
    Ok(WignerGrid {
        grid: grid.clone(),
        values,
        mixing,
        meta: meta_for(&kernel.quad, tail, mixing_nodes),
        signals: Some((phi.clone(), psi.clone())),
    })
}

fn overlap_sum(w1: &WignerGrid, w2: &WignerGrid, model: &GroupModel) -> Complex64 {
    let q_len = w1.grid.q_len();
    let cell = w1.grid.q_cell() * w1.grid.p_cell();
    let mut s = ZERO;
    for p in 0..w1.grid.p_len() {
        if !w1.grid.mask[p] {
            continue;
        }
        let sigma = orbit::delta_slice(&w1.grid.p_point(p), model).abs();
        let mut row = ZERO;
        for q in 0..q_len {
            row += w1.values[p * q_len + q].conj() * w2.values[p * q_len + q];
        }
        s += row / sigma;
    }
    s * cell
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_err: f64,
}

/// `Σ conj(W₁)·W₂·σ⁻¹·cell` against `⟨φ₁|φ₂⟩⟨ψ₂|ψ₁⟩`.
pub fn check_overlap(w1: &WignerGrid, w2: &WignerGrid, model: &GroupModel) -> Result<OverlapReport> {
    if !w1.grid.same_geometry(&w2.grid) {
        return Err(Error::GridMismatch("overlap needs two grids with identical axes and orbit".into()));
    }
    let ((phi1, psi1), (phi2, psi2)) = match (&w1.signals, &w2.signals) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::GridMismatch("overlap needs grids that still carry their signals".into())),
    };
    let lhs = overlap_sum(w1, w2, model);
    let rhs = inner_product(phi1, phi2) * inner_product(psi2, psi1);
    let rel_err = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    Ok(OverlapReport { lhs, rhs, rel_err })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    /// Max over `γ_p` nodes of `|∫W c dγ_q − (2π)^{n/2} conj(ψ(γ_p)) φ(γ_p)|`.
    pub max_abs_err: f64,
    /// Same with the conjugation moved to `φ`.
    pub max_abs_err_swapped: f64,
    /// Largest right-hand side magnitude, for scale.
    pub max_rhs: f64,
    /// Largest `|∫W c dγ_q|` over nodes outside both signals' support boxes.
    pub max_outside_support: f64,
}

/// Integrates `W·c(γ_p)` over the `γ_q` axes at every `γ_p` node.
pub fn check_marginal(w: &WignerGrid, model: &GroupModel) -> Result<MarginalReport> {
    let (phi, psi) = w
        .signals
        .as_ref()
        .ok_or_else(|| Error::GridMismatch("marginal needs a grid that still carries its signals".into()))?;
    let q_len = w.grid.q_len();
    let n = model.n;
    let scale = (2.0 * PI).powf(0.5 * n as f64);
    let mut rep = MarginalReport { max_abs_err: 0.0, max_abs_err_swapped: 0.0, max_rhs: 0.0, max_outside_support: 0.0 };
    for p in 0..w.grid.p_len() {
        if !w.grid.mask[p] {
            continue;
        }
        let gp = w.grid.p_point(p);
        let c = 1.0 / orbit::delta_slice(&gp, model).abs();
        let lhs: Complex64 = w.values[p * q_len..(p + 1) * q_len].iter().sum::<Complex64>() * w.grid.q_cell() * c;
        let (fp, fs) = (phi.evaluate(&gp), psi.evaluate(&gp));
        let rhs = fs.conj() * fp * scale;
        let swapped = fp.conj() * fs * scale;
        rep.max_abs_err = rep.max_abs_err.max((lhs - rhs).norm());
        rep.max_abs_err_swapped = rep.max_abs_err_swapped.max((lhs - swapped).norm());
        rep.max_rhs = rep.max_rhs.max(rhs.norm());
        if !phi.support_hint.contains(&gp) && !psi.support_hint.contains(&gp) {
            rep.max_outside_support = rep.max_outside_support.max(lhs.norm());
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub max_rel_err: f64,
    pub max_abs_err: f64,
    pub max_abs_rhs: f64,
    pub mixing: bool,
}

/// Compares `W(Ûφ, Ûψ | γ)` with `W(φ, ψ | coAd_{g₀⁻¹}γ)` at each probe.
pub fn check_covariance(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    g0: &GroupElement,
    probes: &[CoadjointPoint],
    base: &QuadratureSpec,
) -> Result<CovarianceReport> {
    let model = phi.model.clone();
    let g_inv = crate::group::inverse(g0)?;
    let uphi = rep_apply(g0, phi)?;
    let upsi = rep_apply(g0, psi)?;
    let mut rep = CovarianceReport { max_rel_err: 0.0, max_abs_err: 0.0, max_abs_rhs: 0.0, mixing: false };
    for p in probes {
        let moved = model.coadjoint_apply(&g_inv, p)?;
        let lhs = wigner_point_adaptive(&uphi, &upsi, p, base)?;
        let rhs = wigner_point_adaptive(phi, psi, &moved, base)?;
        rep.max_abs_err = rep.max_abs_err.max((lhs.value - rhs.value).norm());
        rep.max_abs_rhs = rep.max_abs_rhs.max(rhs.value.norm());
        rep.mixing |= lhs.mixing || rhs.mixing;
    }
    rep.max_rel_err = if rep.max_abs_rhs > 0.0 { rep.max_abs_err / rep.max_abs_rhs } else { rep.max_abs_err };
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub signal_orbit: usize,
    pub grid_orbit: usize,
    pub max_abs: f64,
    pub mixing_nodes: usize,
}

/// `max |W|` over a grid lying in another orbit than the signals.
pub fn check_support(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    grid: &PhaseSpaceGrid,
    base: &QuadratureSpec,
) -> Result<SupportReport> {
    let w = wigner_grid(phi, psi, grid, base)?;
    Ok(SupportReport {
        signal_orbit: phi.orbit.label,
        grid_orbit: grid.orbit.label,
        max_abs: w.max_abs(),
        mixing_nodes: w.meta.mixing_nodes,
    })
}
