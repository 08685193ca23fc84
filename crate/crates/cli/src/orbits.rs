use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wigner_core::catalog;
use wigner_core::orbit::{self, DihedralReport, MixingWitness};

use crate::config::LoadedGroup;
use crate::error::CliResult;

pub const PROBE_TRIALS: usize = 10_000;
const BOUNDARY_SAMPLES: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRow {
    pub label: usize,
    pub name: String,
    pub representative: Vec<f64>,
    pub sign_signature: Vec<i8>,
    pub delta_at_representative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaSample {
    pub point: Vec<f64>,
    pub delta: f64,
    /// Orbit label, or `None` on the boundary.
    pub orbit: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingSummary {
    pub orbit: usize,
    pub trials: usize,
    pub mixing_found: usize,
    pub witness: Option<MixingWitness>,
    /// `(t, target orbit)` for each probe-ray sweep that crossed the boundary.
    pub ray_crossings: Vec<(f64, Option<usize>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitsReport {
    pub group: String,
    pub n: usize,
    pub orbits: Vec<OrbitRow>,
    pub delta_samples: Vec<DeltaSample>,
    pub dihedral_cone: bool,
    pub dihedral: Vec<DihedralReport>,
    pub mixing: Vec<MixingSummary>,
    pub notes: Vec<String>,
}

pub fn run(group: &LoadedGroup, seed: u64) -> CliResult<OrbitsReport> {
    let m = &group.model;
    let orbits = m
        .orbits
        .iter()
        .map(|o| OrbitRow {
            label: o.label,
            name: o.name.clone(),
            representative: o.representative.clone(),
            sign_signature: o.sign_signature.clone(),
            delta_at_representative: orbit::delta_slice(&o.representative, m),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta_samples = (0..6)
        .map(|_| {
            let point: Vec<f64> = (0..m.n).map(|_| (rng.gen_range(-2.0..2.0f64) * 100.0).round() / 100.0).collect();
            DeltaSample { delta: orbit::delta_slice(&point, m), orbit: orbit::classify_label(&point, m), point }
        })
        .collect();
    let dihedral = m
        .orbits
        .iter()
        .map(|o| orbit::check_dihedral_cone(o, m, BOUNDARY_SAMPLES, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let mixing = m
        .orbits
        .iter()
        .map(|o| {
            let r = orbit::sinch_mixing_probe(o, m, PROBE_TRIALS, seed)?;
            Ok(MixingSummary {
                orbit: o.label,
                trials: r.trials,
                mixing_found: r.mixing_found,
                witness: r.witnesses.first().cloned(),
                ray_crossings: r.ray_sweeps.iter().filter_map(|s| s.crossing_t.map(|t| (t, s.to_orbit))).collect(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(OrbitsReport {
        group: m.name.clone(),
        n: m.n,
        orbits,
        delta_samples,
        dihedral_cone: dihedral.iter().all(|d| d.is_dihedral_cone),
        dihedral,
        mixing,
        notes: group.entry.as_ref().map(|e| e.notes.clone()).unwrap_or_default(),
    })
}

fn vec_str(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

impl std::fmt::Display for OrbitsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "group {} (n = {}), {} open orbits", self.group, self.n, self.orbits.len())?;
        writeln!(f, "{:<6} {:<12} {:<34} {:<10} Δ(k)", "label", "name", "representative", "signs")?;
        for o in &self.orbits {
            let signs: Vec<&str> = o.sign_signature.iter().map(|s| if *s > 0 { "+" } else { "-" }).collect();
            writeln!(
                f,
                "{:<6} {:<12} {:<34} {:<10} {:+.6}",
                o.label,
                o.name,
                vec_str(&o.representative),
                signs.join(""),
                o.delta_at_representative
            )?;
        }
        writeln!(f, "Δ at sample points:")?;
        for s in &self.delta_samples {
            let where_ = s.orbit.map_or("boundary".to_string(), |l| format!("orbit {l}"));
            writeln!(f, "  Δ{} = {:+.6}  ({where_})", vec_str(&s.point), s.delta)?;
        }
        writeln!(f, "dihedral-cone: {}", if self.dihedral_cone { "yes" } else { "no" })?;
        for d in &self.dihedral {
            if !d.agrees {
                writeln!(f, "  orbit {}: sampling disagrees with the exact boundary", d.orbit)?;
            }
            if let Some(w) = &d.witness {
                writeln!(f, "  orbit {}: non-planar boundary near {}", d.orbit, vec_str(w))?;
            }
        }
        writeln!(f, "sinch mixing probe:")?;
        for m in &self.mixing {
            write!(f, "  orbit {}: {} of {} random trials left the orbit", m.orbit, m.mixing_found, m.trials)?;
            if let Some((t, to)) = m.ray_crossings.first() {
                write!(
                    f,
                    "; probe ray crosses at t = {t:.4} into {}",
                    to.map_or("boundary".into(), |l| format!("orbit {l}"))
                )?;
            }
            writeln!(f)?;
            if let Some(w) = &m.witness {
                writeln!(
                    f,
                    "    witness: ω = {}, X_q = {}, ω·sinch(X_q) = {} in orbit {}",
                    vec_str(&w.omega),
                    vec_str(&w.x_q),
                    vec_str(&w.image),
                    w.to_orbit
                )?;
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub n: usize,
    pub orbits: usize,
    pub dihedral_cone: bool,
    pub basis_scale: Vec<f64>,
}

pub fn catalog_rows() -> Vec<CatalogRow> {
    catalog::all()
        .into_iter()
        .map(|e| CatalogRow {
            name: e.name().to_string(),
            n: e.model.n,
            orbits: e.model.orbits.len(),
            dihedral_cone: e.model.orbits.iter().all(|o| o.is_dihedral_cone),
            basis_scale: e.basis_scale.clone(),
        })
        .collect()
}
