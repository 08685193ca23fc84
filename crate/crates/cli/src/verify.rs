//! Invariant suites run by `wigner-orbits verify`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wigner_core::group::{CoadjointPoint, GroupModel};
use wigner_core::linalg::{self, Vector};
use wigner_core::orbit;
use wigner_core::quadrature::{QuadratureSpec, Rule};
use wigner_core::representation::OrbitFunction;
use wigner_core::wigner::{
    adapt_kernel, check_covariance, check_marginal, check_overlap, check_support, wigner_grid, wigner_point, Axis,
    PhaseSpaceGrid,
};

use crate::config::LoadedGroup;
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Covariance,
    Overlap,
    Marginal,
    Support,
    Measures,
    All,
}

impl Suite {
    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Measures, Suite::Covariance, Suite::Overlap, Suite::Marginal, Suite::Support],
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Covariance => "covariance",
            Suite::Overlap => "overlap",
            Suite::Marginal => "marginal",
            Suite::Support => "support",
            Suite::Measures => "measures",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// `"<"` when the value must stay below the tolerance, `">"` when above.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub group: String,
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Suites<'a> {
    suite: Suite,
    checks: &'a mut Vec<Check>,
}

impl Suites<'_> {
    fn push(&mut self, name: &str, status: Status, value: Option<f64>, tol: Option<(f64, &str)>, detail: String) {
        self.checks.push(Check {
            suite: self.suite.name().into(),
            name: name.into(),
            status,
            value,
            tolerance: tol.map(|t| t.0),
            relation: tol.map(|t| t.1.to_string()),
            detail,
        });
    }

    fn below(&mut self, name: &str, value: f64, tol: f64, detail: String) {
        let status = if value < tol { Status::Pass } else { Status::Fail };
        self.push(name, status, Some(value), Some((tol, "<")), detail);
    }

    fn above(&mut self, name: &str, value: f64, tol: f64, detail: String) {
        let status = if value > tol { Status::Pass } else { Status::Fail };
        self.push(name, status, Some(value), Some((tol, ">")), detail);
    }

    fn skip(&mut self, name: &str, detail: &str) {
        self.push(name, Status::Skipped, None, None, detail.into());
    }
}

/// `2·k_j` plus a jitter that keeps the point on orbit `label`.
fn signal_center(model: &GroupModel, label: usize, rng: &mut ChaCha8Rng, jitter: f64) -> Vec<f64> {
    let base: Vec<f64> = model.orbits[label].representative.iter().map(|v| 2.0 * v).collect();
    for _ in 0..100 {
        let c: Vec<f64> = base.iter().map(|v| v + rng.gen_range(-jitter..=jitter)).collect();
        if orbit::classify_label(&c, model) == Some(label) {
            return c;
        }
    }
    base
}

fn signal_width(n: usize) -> f64 {
    match n {
        0..=2 => 0.3,
        3 => 0.35,
        _ => 0.4,
    }
}

fn measures(model: &GroupModel, group: &LoadedGroup, rng: &mut ChaCha8Rng, s: &mut Suites) -> CliResult<()> {
    let mut worst: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for _ in 0..100 {
        let label = rng.gen_range(0..model.orbits.len());
        let p = orbit::sample_orbit_point(model, label, rng, 1.0)?;
        let r = orbit::measure_equalities(&p, model)?;
        worst = worst.max(r.spread);
        if let Some(e) = &group.entry {
            let c = 1.0 / r.c_inv;
            let closed = e.c_closed(p.gamma_p.as_slice());
            worst_closed = worst_closed.max((c - closed).abs() / closed.abs());
        }
    }
    s.below(
        "orbit densities agree",
        worst,
        1e-8,
        "max relative spread of 1/c, |det T|, |det Θ|^(1/2), Δ_G(κ̃) at 100 random points".into(),
    );
    if group.entry.is_some() {
        s.below("closed-form c", worst_closed, 1e-9, "max relative gap between closed-form and generic c".into());
    }
    Ok(())
}

fn covariance(model: &Arc<GroupModel>, rng: &mut ChaCha8Rng, s: &mut Suites) -> CliResult<()> {
    let (elements, probes) = if model.n <= 2 { (5, 10) } else { (2, 3) };
    let w = signal_width(model.n);
    let center = signal_center(model, 0, rng, 0.3);
    let slope: Vec<f64> = (0..model.n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let phi = OrbitFunction::gaussian(model.clone(), 0, &center, w)?;
    let psi = OrbitFunction::gaussian_with(model.clone(), 0, &center, 1.15 * w, Complex64::new(1.0, 0.0), &slope)?;
    let base = QuadratureSpec::default_for(model);
    for k in 0..elements {
        let g0 = model.sample_element(rng, 0.3, 1.0);
        let points: Vec<CoadjointPoint> = (0..probes)
            .map(|_| {
                let mut v: Vec<f64> = (0..model.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                v.extend(center.iter().map(|c| c + rng.gen_range(-0.2..0.2)));
                model.coadjoint_apply(&g0, &CoadjointPoint::from_slice(&v))
            })
            .collect::<Result<_, _>>()?;
        let r = check_covariance(&phi, &psi, &g0, &points, &base)?;
        s.below(
            &format!("element {}", k + 1),
            r.max_rel_err,
            1e-2,
            format!("max |W(Uφ,Uψ|γ) − W(φ,ψ|coAd γ)| / max |W| over {probes} probes; mixing: {}", r.mixing),
        );
    }
    Ok(())
}

fn overlap(model: &Arc<GroupModel>, rng: &mut ChaCha8Rng, s: &mut Suites) -> CliResult<()> {
    if model.n != 2 {
        s.skip("overlap", "grid overlap sums are evaluated for two-dimensional groups only");
        return Ok(());
    }
    let c = signal_center(model, 0, rng, 0.2);
    let phi = OrbitFunction::gaussian(model.clone(), 0, &c, 0.3)?;
    let d: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.15..0.15)).collect();
    let c2: Vec<f64> = c.iter().zip(&d).map(|(a, b)| a + b).collect();
    let psi = OrbitFunction::gaussian_with(model.clone(), 0, &c2, 0.3, Complex64::new(1.0, 0.0), &[0.5, 0.0])?;
    let lo: Vec<f64> = c.iter().map(|v| v - 1.35).collect();
    let hi: Vec<f64> = c.iter().map(|v| v + 1.35).collect();
    let (grid, base) = overlap_grid(&phi, &psi, &lo, &hi)?;
    let w1 = wigner_grid(&phi, &phi, &grid, &base)?;
    let w2 = wigner_grid(&phi, &psi, &grid, &base)?;
    let iso = check_overlap(&w1, &w1, model)?;
    s.below("isometry", iso.rel_err, 1e-2, format!("Σ|W|²σ⁻¹ = {:.6} vs ‖φ‖⁴ = {:.6}", iso.lhs.re, iso.rhs.re));
    let r = check_overlap(&w1, &w2, model)?;
    s.below("overlap", r.rel_err, 1e-2, format!("lhs {:.6} vs ⟨φ|φ⟩⟨ψ|φ⟩ {:.6}", r.lhs, r.rhs));
    let b1c = [c[0] - 0.4, c[1] + 0.4];
    let b2c = [c[0] + 0.8, c[1] - 0.7];
    if orbit::classify_label(&b1c, model) == Some(0) && orbit::classify_label(&b2c, model) == Some(0) {
        let b1 = OrbitFunction::bump(model.clone(), 0, &b1c, 0.5)?;
        let b2 = OrbitFunction::bump(model.clone(), 0, &b2c, 0.5)?;
        let o = check_overlap(&wigner_grid(&b1, &b1, &grid, &base)?, &wigner_grid(&b2, &b2, &grid, &base)?, model)?;
        s.below("orthogonal signals", o.lhs.norm(), 1e-3, "disjoint bumps, |Σ conj(W₁)W₂σ⁻¹|".into());
    } else {
        s.skip("orthogonal signals", "bump centers leave the orbit");
    }
    Ok(())
}

/// Grid and fixed quadrature for the overlap sums. The `γ_q` Riemann sum repeats in `x`
/// with period `2π/Δγ_q`, so the node count is raised until the adapted box fits inside one period.
fn overlap_grid(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    lo: &[f64],
    hi: &[f64],
) -> CliResult<(PhaseSpaceGrid, QuadratureSpec)> {
    let model = &phi.model;
    let coarse: Vec<Axis> = lo.iter().zip(hi).map(|(l, h)| Axis::new(*l, *h, 3)).collect::<Result<_, _>>()?;
    let probes: Vec<Vec<f64>> = (0..9)
        .map(|i| vec![coarse[0].node(i / 3), coarse[1].node(i % 3)])
        .filter(|k| orbit::classify_label(k, model) == Some(phi.orbit.label))
        .collect();
    let (kernel, _) = adapt_kernel(phi, psi, &probes, &QuadratureSpec::for_model(model, 96, 2.0, 1e-4)?)?;
    let bx = kernel.quad;
    let extent = bx.lower.iter().zip(&bx.upper).map(|(l, u)| u - l).fold(0.0, f64::max);
    let g = OVERLAP_WINDOW;
    let q_count = (((2.0 * g * extent / (2.0 * PI)) * 1.25).ceil() as usize + 1).max(48);
    let points = ((0.35 * g * extent).ceil() as usize + 32).max(96);
    let quad = QuadratureSpec::new(bx.rule, points, bx.lower, bx.upper, f64::INFINITY)?;
    Ok((PhaseSpaceGrid::uniform(model, phi.orbit.label, g, q_count, lo, hi, 40)?, quad))
}

const OVERLAP_WINDOW: f64 = 20.0;

/// Widest `|W|` on the outer quarter of the `γ_q` window, relative to the largest `|W|`.
fn q_edge_ratio(w: &wigner_core::wigner::WignerGrid) -> f64 {
    let q_len = w.grid.q_len();
    let g = w.grid.gamma_q_axes[0].max;
    let (mut edge, mut bulk) = (0.0f64, 0.0f64);
    for q in 0..q_len {
        let far = w.grid.q_point(q).iter().any(|v| v.abs() >= 0.75 * g);
        for p in 0..w.grid.p_len() {
            let v = w.values[p * q_len + q].norm();
            bulk = bulk.max(v);
            if far {
                edge = edge.max(v);
            }
        }
    }
    if bulk > 0.0 {
        edge / bulk
    } else {
        0.0
    }
}

/// Fixes the integration box from the integrand tail, then doubles the `γ_q` window (with a rule
/// fine enough to resolve `e^{iγ_q·x}` on that box) until `|W|` has decayed at its edge.
/// The window is probed on the corners and center of the `γ_p` box.
fn marginal_window(
    phi: &OrbitFunction,
    psi: &OrbitFunction,
    p_axes: &[Axis],
) -> CliResult<(f64, usize, QuadratureSpec)> {
    let model = &phi.model;
    let coarse: Vec<Axis> = p_axes.iter().map(|a| Axis::new(a.min, a.max, 3)).collect::<Result<_, _>>()?;
    let probes: Vec<Vec<f64>> = (0..9)
        .map(|i| vec![coarse[0].node(i / 3), coarse[1].node(i % 3)])
        .filter(|k| orbit::classify_label(k, model) == Some(phi.orbit.label))
        .collect();
    let (kernel, _) = adapt_kernel(phi, psi, &probes, &QuadratureSpec::for_model(model, 192, 2.0, 1e-4)?)?;
    let bx = kernel.quad.clone();
    let extent = bx.lower.iter().zip(&bx.upper).map(|(l, u)| u - l).fold(0.0, f64::max);
    let mut g = MARGINAL_WINDOW;
    loop {
        let q_count = (MARGINAL_Q_POINTS as f64 * g / MARGINAL_WINDOW).round() as usize;
        let points = ((0.35 * g * extent).ceil() as usize + 32).max(128);
        let quad = QuadratureSpec::new(bx.rule, points, bx.lower.clone(), bx.upper.clone(), f64::INFINITY)?;
        if g >= 4.0 * MARGINAL_WINDOW {
            return Ok((g, q_count, quad));
        }
        let grid =
            PhaseSpaceGrid::new(model, phi.orbit.label, vec![Axis::new(-g, g, q_count / 8)?; 2], coarse.clone())?;
        if q_edge_ratio(&wigner_grid(phi, psi, &grid, &quad)?) < 1e-6 {
            return Ok((g, q_count, quad));
        }
        g *= 2.0;
    }
}

const MARGINAL_WINDOW: f64 = 40.0;
const MARGINAL_Q_POINTS: usize = 256;

fn marginal(model: &Arc<GroupModel>, rng: &mut ChaCha8Rng, s: &mut Suites) -> CliResult<()> {
    if model.n != 2 {
        s.skip("marginal", "γ_q marginals are evaluated for two-dimensional groups only");
        return Ok(());
    }
    let c = signal_center(model, 0, rng, 0.2);
    let phi = OrbitFunction::gaussian(model.clone(), 0, &c, 0.3)?;
    let slope: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.8..0.8)).collect();
    let psi = OrbitFunction::gaussian_with(model.clone(), 0, &c, 0.3, Complex64::new(1.0, 0.0), &slope)?;
    let p_axes = vec![Axis::new(c[0] - 1.0, c[0] + 1.0, 9)?, Axis::new(c[1] - 1.0, c[1] + 1.0, 5)?];
    let (g, q_count, quad) = marginal_window(&phi, &psi, &p_axes)?;
    let grid = PhaseSpaceGrid::new(model, 0, vec![Axis::new(-g, g, q_count)?; 2], p_axes)?;
    let r = check_marginal(&wigner_grid(&phi, &psi, &grid, &quad)?, model)?;
    s.below(
        "γ_q marginal",
        r.max_abs_err,
        1e-3,
        format!(
            "max |∫W c dγ_q − (2π)^(n/2) conj(ψ)φ|, scale {:.3e}; conjugation on φ instead gives {:.3e}; γ_q ∈ [±{g}] with {q_count} nodes, {}-point rule",
            r.max_rhs, r.max_abs_err_swapped, quad.points_per_dim
        ),
    );
    s.below("outside support", r.max_outside_support, 1e-6, "marginal away from both signals".into());
    Ok(())
}

fn support(model: &Arc<GroupModel>, group: &LoadedGroup, s: &mut Suites) -> CliResult<()> {
    let counterexample =
        matches!(group.entry.as_ref().map(|e| e.group), Some(wigner_core::catalog::CatalogGroup::Counterexample3d));
    if counterexample {
        return counterexample_support(model, s);
    }
    if model.orbits.len() < 2 {
        s.skip("support", "single open orbit; confinement to it is automatic");
        return Ok(());
    }
    if !model.orbits.iter().all(|o| o.is_dihedral_cone) {
        s.skip("support", "orbits are not dihedral cones and no leakage construction is known for this model");
        return Ok(());
    }
    let base = QuadratureSpec::default_for(model);
    let w = signal_width(model.n);
    let (p_count, q_count) = if model.n <= 2 { (8, 5) } else { (4, 3) };
    for target in 1..model.orbits.len() {
        let c = signal_center(model, 0, &mut ChaCha8Rng::seed_from_u64(0), 0.0);
        let phi = OrbitFunction::gaussian(model.clone(), 0, &c, w)?;
        let t = signal_center(model, target, &mut ChaCha8Rng::seed_from_u64(0), 0.0);
        let lo: Vec<f64> = t.iter().map(|v| v - 1.5).collect();
        let hi: Vec<f64> = t.iter().map(|v| v + 1.5).collect();
        let grid = PhaseSpaceGrid::uniform(model, target, 3.0, q_count, &lo, &hi, p_count)?;
        let r = check_support(&phi, &phi, &grid, &base)?;
        s.below(
            &format!("orbit 0 → orbit {target}"),
            r.max_abs,
            1e-6,
            format!("max |W| on a grid in orbit {target} for a Gaussian in orbit 0"),
        );
    }
    Ok(())
}

/// The leakage construction for the non-dihedral group.
///
/// With `γ_p` in O1 and `X_q = (−0.3, 6, 3)` both warped arguments `γ_p·F(∓X)⁻¹` lie in O2,
/// so signals supported in O2 produce a nonzero Wigner function over O1.
/// The opposite direction (signals in O1 seen from `γ_p` in O2) is reported for information.
fn counterexample_support(model: &Arc<GroupModel>, s: &mut Suites) -> CliResult<()> {
    let quad = QuadratureSpec::new(Rule::GaussLegendre, 48, vec![-3.0, -9.0, -5.0], vec![3.0, 9.0, 5.0], 1e-3)?;
    let x_star = model.x_q_matrix(&[-0.3, 6.0, 3.0]);
    let warp = |gp: &Vector| -> CliResult<(Vector, Vector)> {
        Ok((
            linalg::f_minus_inverse(&x_star, &model.series)?.tr_mul(gp),
            linalg::f_minus_inverse(&-x_star.clone(), &model.series)?.tr_mul(gp),
        ))
    };

    let o2 = Vector::from_column_slice(&model.orbits[1].representative);
    let phi = OrbitFunction::gaussian(model.clone(), 0, &[3.0, 0.0, 2.0], 0.5)?;
    let mut stated: f64 = 0.0;
    let mut stated_mixing = false;
    for gq in [[0.0, 0.0, 0.0], [0.5, -0.5, 0.2], [-1.0, 0.3, 0.7]] {
        let p = CoadjointPoint::new(Vector::from_column_slice(&gq), o2.clone());
        let v = wigner_point(&phi, &phi, &p, &quad)?;
        stated = stated.max(v.value.norm());
        stated_mixing |= v.mixing;
    }
    s.push(
        "signals in O1, γ_p in O2",
        Status::Info,
        Some(stated),
        None,
        format!("max |W| = {stated:.3e}, mixing {stated_mixing}; the warps never carry O2 into O1"),
    );

    let gp = Vector::from_column_slice(&model.orbits[0].representative);
    let (a, b) = warp(&gp)?;
    let psi = OrbitFunction::bump(model.clone(), 1, a.as_slice(), 1.0)?;
    let phi = OrbitFunction::bump(model.clone(), 1, b.as_slice(), 1.0)?;
    let v = wigner_point(&phi, &psi, &CoadjointPoint::new(Vector::zeros(3), gp), &quad)?;
    s.above(
        "signals in O2, γ_p in O1",
        v.value.norm(),
        1e-3,
        format!("|W| at γ = (0, k_O1) for bumps around the warped arguments; mixing flag {}", v.mixing),
    );
    let status = if v.mixing { Status::Pass } else { Status::Fail };
    s.push("mixing flag raised", status, None, None, "warped arguments left the orbit of γ_p".into());
    Ok(())
}

pub fn run(group: &LoadedGroup, suite: Suite, seed: u64) -> CliResult<VerifyReport> {
    let model = group.model.clone();
    let mut checks = Vec::new();
    for (i, part) in suite.expand().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut s = Suites { suite: part, checks: &mut checks };
        match part {
            Suite::Measures => measures(&model, group, &mut rng, &mut s)?,
            Suite::Covariance => covariance(&model, &mut rng, &mut s)?,
            Suite::Overlap => overlap(&model, &mut rng, &mut s)?,
            Suite::Marginal => marginal(&model, &mut rng, &mut s)?,
            Suite::Support => support(&model, group, &mut s)?,
            Suite::All => unreachable!("expanded above"),
        }
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(VerifyReport { group: model.name.clone(), suite, seed, passed, checks })
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
                Status::Info => "INFO",
            };
            let value = match (c.value, c.tolerance, &c.relation) {
                (Some(v), Some(t), Some(r)) => format!(" {v:.3e} {r} {t:.0e}"),
                (Some(v), _, _) => format!(" {v:.3e}"),
                _ => String::new(),
            };
            writeln!(f, "{tag} {}/{}{value}  ({})", c.suite, c.name, c.detail)?;
        }
        write!(f, "{}: {}", self.group, if self.passed { "all checks passed" } else { "some checks failed" })
    }
}
