//! Job configuration: JSON schema, signal and grid spec strings, and their resolution.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wigner_core::catalog::{self, CatalogEntry};
use wigner_core::group::GroupModel;
use wigner_core::io;
use wigner_core::orbit;
use wigner_core::quadrature::{default_points, QuadratureSpec, Rule, DEFAULT_HALF_WIDTH};
use wigner_core::representation::OrbitFunction;
use wigner_core::wigner::{Axis, PhaseSpaceGrid};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Catalog name or path to a group-model JSON file.
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    /// Orbit label of the signals and the grid; inferred from `signal_phi` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<usize>,
    pub signal_phi: String,
    /// Defaults to `signal_phi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_psi: Option<String>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridConfig {
    /// `"default"` or a spec string `q=MIN:MAX:N[,…];p=MIN:MAX:N[,…]`.
    Spec(String),
    Axes {
        gamma_q: Vec<Axis>,
        gamma_p: Vec<Axis>,
    },
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig::Spec("default".into())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_dim: Option<usize>,
    /// Symmetric box `[−L, L]ⁿ`; ignored when `lower` and `upper` are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Rawgrid,
    #[serde(alias = "png-heatmap")]
    #[value(alias = "png-heatmap")]
    Png,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    #[default]
    Abs,
    Re,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapConfig {
    #[serde(default)]
    pub quantity: Quantity,
    /// Displayed axes as indices into `(γ_q1, …, γ_qn, γ_p1, …, γ_pn)`.
    #[serde(default = "default_slice_axes")]
    pub axes: [usize; 2],
    /// Node index for every axis; entries of the displayed axes are ignored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<usize>>,
}

fn default_slice_axes() -> [usize; 2] {
    [0, 1]
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        Self { quantity: Quantity::Abs, axes: default_slice_axes(), fixed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output stem; extensions are appended per format.
    #[serde(default = "default_output_path")]
    pub path: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
    #[serde(default)]
    pub heatmap: HeatmapConfig,
}

fn default_output_path() -> PathBuf {
    PathBuf::from("wigner")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: default_output_path(), formats: default_formats(), heatmap: HeatmapConfig::default() }
    }
}

/// A group resolved from a catalog name or a model file.
#[derive(Debug, Clone)]
pub struct LoadedGroup {
    pub model: Arc<GroupModel>,
    pub entry: Option<CatalogEntry>,
}

pub fn load_group(name: &str, param: Option<f64>) -> CliResult<LoadedGroup> {
    if catalog::NAMES.contains(&name) {
        let entry = catalog::by_name(name, param)?;
        return Ok(LoadedGroup { model: entry.model.clone(), entry: Some(entry) });
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(CliError::Config(format!(
            "unknown group '{name}': neither a catalog name ({}) nor a model file",
            catalog::NAMES.join(", ")
        )));
    }
    if param.is_some() {
        return Err(CliError::Config("--param applies only to catalog groups".into()));
    }
    let model = GroupModel::from_json(&std::fs::read_to_string(path)?)?;
    Ok(LoadedGroup { model: Arc::new(model), entry: None })
}

/// Parsed signal spec, e.g. `gaussian:center=2,3:width=0.5`.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    Zero,
    Gaussian { center: Vec<f64>, width: f64, amplitude: Complex64, slope: Option<Vec<f64>> },
    Bump { center: Vec<f64>, radius: f64 },
    Csv { path: PathBuf },
    Raw { path: PathBuf, sidecar: PathBuf },
}

fn numbers(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Config(format!("'{key}' expects numbers, got '{v}'"))))
        .collect()
}

fn number(key: &str, v: &str) -> CliResult<f64> {
    match numbers(key, v)?.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::Config(format!("'{key}' expects one number, got '{v}'"))),
    }
}

impl SignalSpec {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let spec = spec.trim();
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut fields: Vec<(&str, &str)> = Vec::new();
        let mut bare: Option<&str> = None;
        for part in rest.split(':').filter(|s| !s.is_empty()) {
            match part.split_once('=') {
                Some((k, v)) => fields.push((k.trim(), v.trim())),
                None if bare.is_none() => bare = Some(part),
                None => return Err(CliError::Config(format!("malformed signal spec '{spec}'"))),
            }
        }
        let get = |k: &str| fields.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
        let known: &[&str] = match kind {
            "zero" => &[],
            "gaussian" => &["center", "width", "amplitude", "slope"],
            "bump" => &["center", "radius"],
            "csv" => &["path"],
            "raw" => &["path", "sidecar"],
            _ => {
                let p = Path::new(spec);
                return match p.extension().and_then(|e| e.to_str()) {
                    Some("csv") => Ok(SignalSpec::Csv { path: p.to_path_buf() }),
                    Some("bin") | Some("raw") => {
                        Ok(SignalSpec::Raw { path: p.to_path_buf(), sidecar: p.with_extension("json") })
                    }
                    _ => Err(CliError::Config(format!(
                        "unknown signal kind '{kind}' (gaussian, bump, zero, csv, raw or a .csv/.bin path)"
                    ))),
                };
            }
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !known.contains(k)) {
            return Err(CliError::Config(format!("signal kind '{kind}' has no field '{k}'")));
        }
        let require = |k: &str| get(k).ok_or_else(|| CliError::Config(format!("signal kind '{kind}' needs '{k}='")));
        Ok(match kind {
            "zero" => SignalSpec::Zero,
            "gaussian" => {
                let amplitude = match get("amplitude").map(|v| numbers("amplitude", v)).transpose()?.as_deref() {
                    None => Complex64::new(1.0, 0.0),
                    Some([re]) => Complex64::new(*re, 0.0),
                    Some([re, im]) => Complex64::new(*re, *im),
                    Some(_) => return Err(CliError::Config("'amplitude' takes re or re,im".into())),
                };
                SignalSpec::Gaussian {
                    center: numbers("center", require("center")?)?,
                    width: number("width", require("width")?)?,
                    amplitude,
                    slope: get("slope").map(|v| numbers("slope", v)).transpose()?,
                }
            }
            "bump" => SignalSpec::Bump {
                center: numbers("center", require("center")?)?,
                radius: number("radius", require("radius")?)?,
            },
            "csv" => SignalSpec::Csv {
                path: PathBuf::from(
                    get("path").or(bare).ok_or_else(|| CliError::Config("csv signal needs a path".into()))?,
                ),
            },
            _ => {
                let path = PathBuf::from(
                    get("path").or(bare).ok_or_else(|| CliError::Config("raw signal needs a path".into()))?,
                );
                let sidecar = get("sidecar").map(PathBuf::from).unwrap_or_else(|| path.with_extension("json"));
                SignalSpec::Raw { path, sidecar }
            }
        })
    }

    /// A point the signal is concentrated around, when the spec names one.
    pub fn center(&self) -> Option<&[f64]> {
        match self {
            SignalSpec::Gaussian { center, .. } | SignalSpec::Bump { center, .. } => Some(center),
            _ => None,
        }
    }

    /// Length scale used for the default grid.
    pub fn scale(&self) -> Option<f64> {
        match self {
            SignalSpec::Gaussian { width, .. } => Some(*width),
            SignalSpec::Bump { radius, .. } => Some(0.5 * radius),
            _ => None,
        }
    }

    pub fn build(&self, model: &Arc<GroupModel>, orbit: usize, label: &str) -> CliResult<OrbitFunction> {
        let check_file = |p: &Path| {
            if p.is_file() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{label}: file '{}' does not exist", p.display())))
            }
        };
        Ok(match self {
            SignalSpec::Zero => OrbitFunction::zero(model.clone(), orbit)?,
            SignalSpec::Gaussian { center, width, amplitude, slope } => {
                let slope = slope.clone().unwrap_or_else(|| vec![0.0; model.n]);
                OrbitFunction::gaussian_with(model.clone(), orbit, center, *width, *amplitude, &slope)?
            }
            SignalSpec::Bump { center, radius } => OrbitFunction::bump(model.clone(), orbit, center, *radius)?,
            SignalSpec::Csv { path } => {
                check_file(path)?;
                let grid = io::read_signal_csv(std::fs::File::open(path)?)?;
                OrbitFunction::sampled(model.clone(), orbit, grid, &format!("csv:{}", path.display()))?
            }
            SignalSpec::Raw { path, sidecar } => {
                check_file(path)?;
                check_file(sidecar)?;
                let grid = io::read_signal_raw(path, sidecar)?;
                OrbitFunction::sampled(model.clone(), orbit, grid, &format!("raw:{}", path.display()))?
            }
        })
    }
}

fn parse_axes(spec: &str, n: usize) -> CliResult<Vec<Axis>> {
    let axes: Vec<Axis> = spec
        .split(',')
        .map(|a| {
            let parts: Vec<&str> = a.split(':').collect();
            let [min, max, count] = parts.as_slice() else {
                return Err(CliError::Config(format!("axis '{a}' is not MIN:MAX:N")));
            };
            let count: usize =
                count.trim().parse().map_err(|_| CliError::Config(format!("axis '{a}': bad node count")))?;
            Ok(Axis::new(number("axis", min)?, number("axis", max)?, count)?)
        })
        .collect::<CliResult<_>>()?;
    match axes.len() {
        1 => Ok(vec![axes[0]; n]),
        l if l == n => Ok(axes),
        l => Err(CliError::Config(format!("{l} axes given, the group needs 1 or {n}"))),
    }
}

/// Parses `q=…;p=…` into γ_q and γ_p axes.
pub fn parse_grid_spec(spec: &str, n: usize) -> CliResult<(Vec<Axis>, Vec<Axis>)> {
    let (mut q, mut p) = (None, None);
    for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        match part.split_once('=') {
            Some(("q", v)) => q = Some(parse_axes(v, n)?),
            Some(("p", v)) => p = Some(parse_axes(v, n)?),
            _ => return Err(CliError::Config(format!("grid spec part '{part}' is not q=… or p=…"))),
        }
    }
    match (q, p) {
        (Some(q), Some(p)) => Ok((q, p)),
        _ => Err(CliError::Config("grid spec needs both q=… and p=…".into())),
    }
}

/// `(γ_p nodes, γ_q nodes)` per axis of the default grid.
fn default_counts(n: usize) -> (usize, usize) {
    match n {
        0..=2 => (17, 33),
        3 => (5, 9),
        _ => (3, 5),
    }
}

/// Default grid: `γ_p` on `center ± 2s`, `γ_q` on `[−G, G]` with `G = clamp(2‖center‖∞ / s, 4, 40)`.
pub fn default_grid(center: &[f64], scale: f64, n: usize) -> CliResult<(Vec<Axis>, Vec<Axis>)> {
    let (pc, qc) = default_counts(n);
    let g = (2.0 * center.iter().fold(0.0f64, |a, c| a.max(c.abs())) / scale).clamp(4.0, 40.0);
    let q = vec![Axis::new(-g, g, qc)?; n];
    let p = center.iter().map(|c| Axis::new(c - 2.0 * scale, c + 2.0 * scale, pc)).collect::<Result<Vec<_>, _>>()?;
    Ok((q, p))
}

impl QuadratureConfig {
    pub fn resolve(&self, model: &GroupModel) -> CliResult<QuadratureSpec> {
        let n = model.n;
        let pts = self.points_per_dim.unwrap_or_else(|| default_points(n));
        let tol = self.rel_tol.unwrap_or(1e-3);
        let rule = self.rule.unwrap_or(Rule::GaussLegendre);
        let (lower, upper) = match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => (l.clone(), u.clone()),
            (None, None) => {
                let h = self.half_width.unwrap_or(DEFAULT_HALF_WIDTH);
                (vec![-h; n], vec![h; n])
            }
            _ => return Err(CliError::Config("quadrature needs both lower and upper, or neither".into())),
        };
        if lower.len() != n || upper.len() != n {
            return Err(CliError::Config(format!("quadrature box must have {n} coordinates")));
        }
        Ok(QuadratureSpec::new(rule, pts, lower, upper, tol)?.clipped(&model.exp_domain))
    }
}

/// Everything `compute` needs, resolved from a config.
pub struct ResolvedJob {
    pub group: LoadedGroup,
    pub phi: OrbitFunction,
    pub psi: OrbitFunction,
    pub grid: PhaseSpaceGrid,
    pub quadrature: QuadratureSpec,
}

impl JobConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config '{}': {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config '{}': {e}", path.display())))
    }

    pub fn resolve(&self) -> CliResult<ResolvedJob> {
        let group = load_group(&self.group, self.param)?;
        let model = group.model.clone();
        let phi_spec = SignalSpec::parse(&self.signal_phi)?;
        let psi_spec = match &self.signal_psi {
            Some(s) => SignalSpec::parse(s)?,
            None => phi_spec.clone(),
        };
        for c in [phi_spec.center(), psi_spec.center()].into_iter().flatten() {
            if c.len() != model.n {
                return Err(CliError::Config(format!("signal center {c:?} needs {} coordinates", model.n)));
            }
        }
        let orbit = match (self.orbit, phi_spec.center().or(psi_spec.center())) {
            (Some(o), _) => o,
            (None, Some(c)) => orbit::classify_label(c, &model).ok_or_else(|| {
                CliError::Config(format!("signal center {c:?} lies on an orbit boundary of '{}'", model.name))
            })?,
            (None, None) => 0,
        };
        if orbit >= model.orbits.len() {
            return Err(CliError::Config(format!("group '{}' has {} orbits", model.name, model.orbits.len())));
        }
        let phi = phi_spec.build(&model, orbit, "signal_phi")?;
        let psi = psi_spec.build(&model, orbit, "signal_psi")?;
        let (q_axes, p_axes) = match &self.grid {
            GridConfig::Axes { gamma_q, gamma_p } => (gamma_q.clone(), gamma_p.clone()),
            GridConfig::Spec(s) if s.trim() == "default" => {
                let center = phi_spec
                    .center()
                    .or(psi_spec.center())
                    .map(<[f64]>::to_vec)
                    .unwrap_or_else(|| phi.support_hint.center());
                let scale = phi_spec.scale().or(psi_spec.scale()).unwrap_or_else(|| {
                    let b = &phi.support_hint;
                    b.lo.iter().zip(&b.hi).map(|(l, h)| h - l).fold(f64::MAX, f64::min) / 8.0
                });
                default_grid(&center, scale, model.n)?
            }
            GridConfig::Spec(s) => parse_grid_spec(s, model.n)?,
        };
        let grid = PhaseSpaceGrid::new(&model, orbit, q_axes, p_axes)?;
        let quadrature = self.quadrature.resolve(&model)?;
        Ok(ResolvedJob { group, phi, psi, grid, quadrature })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_gaussian_spec() {
        let s = SignalSpec::parse("gaussian:center=2,3:width=0.5").unwrap();
        assert_eq!(
            s,
            SignalSpec::Gaussian {
                center: vec![2.0, 3.0],
                width: 0.5,
                amplitude: Complex64::new(1.0, 0.0),
                slope: None
            }
        );
        let s = SignalSpec::parse("gaussian:center=1,1:width=0.2:amplitude=0,1:slope=1,-1").unwrap();
        assert!(matches!(s, SignalSpec::Gaussian { amplitude, .. } if amplitude == Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn parses_file_specs() {
        assert_eq!(SignalSpec::parse("data/sig.csv").unwrap(), SignalSpec::Csv { path: "data/sig.csv".into() });
        assert_eq!(
            SignalSpec::parse("raw:s.bin").unwrap(),
            SignalSpec::Raw { path: "s.bin".into(), sidecar: "s.json".into() }
        );
        assert_eq!(
            SignalSpec::parse("raw:path=s.bin:sidecar=meta.json").unwrap(),
            SignalSpec::Raw { path: "s.bin".into(), sidecar: "meta.json".into() }
        );
    }

    #[test]
    fn rejects_bad_specs() {
        for s in ["gaussian:center=2,3", "gaussian:center=a:width=1", "bump:center=1:radius=1:width=2", "blob:x=1"] {
            assert!(SignalSpec::parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn grid_spec_broadcasts() {
        let (q, p) = parse_grid_spec("q=-4:4:9;p=1:3:5,2:4:5", 2).unwrap();
        assert_eq!(q, vec![Axis::new(-4.0, 4.0, 9).unwrap(); 2]);
        assert_eq!(p[1], Axis::new(2.0, 4.0, 5).unwrap());
        assert!(parse_grid_spec("q=-4:4:9", 2).is_err());
        assert!(parse_grid_spec("q=-4:4:9;p=1:3:5,2:4:5,1:2:3", 2).is_err());
    }

    #[test]
    fn config_json_defaults() {
        let c: JobConfig =
            serde_json::from_str(r#"{"group":"diagonal","signal_phi":"gaussian:center=2,3:width=0.5"}"#).unwrap();
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.output.formats, vec![OutputFormat::Csv]);
        let c: JobConfig = serde_json::from_str(
            r#"{"group":"sim2","signal_phi":"zero","grid":{"gamma_q":[{"min":-1,"max":1,"count":3},{"min":-1,"max":1,"count":3}],
                "gamma_p":[{"min":1,"max":2,"count":2},{"min":0,"max":1,"count":2}]},
                "output":{"formats":["rawgrid","png-heatmap"]}}"#,
        )
        .unwrap();
        assert!(matches!(c.grid, GridConfig::Axes { .. }));
        assert_eq!(c.output.formats, vec![OutputFormat::Rawgrid, OutputFormat::Png]);
        assert!(serde_json::from_str::<JobConfig>(r#"{"group":"x","signal_phi":"zero","bogus":1}"#).is_err());
    }
}
