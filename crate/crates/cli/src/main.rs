use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wigner_core::catalog;
use wigner_core::quadrature::Rule;
use wigner_orbits::config::{load_group, GridConfig, JobConfig, OutputFormat, Quantity};
use wigner_orbits::verify::Suite;
use wigner_orbits::{compute, orbits, verify, CliError, CliResult};

#[derive(Parser)]
#[command(name = "wigner-orbits", version, about = "Wigner functions on coadjoint orbits of ℝⁿ⋊H")]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, env = "WIGNER_ORBITS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a Wigner function on a phase-space grid and write it out.
    Compute(Box<ComputeArgs>),
    /// Run an invariant suite and report per-check errors.
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the orbit table, boundary geometry and the sinch mixing probe.
    Orbits {
        #[arg(long)]
        group: String,
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// List the built-in groups or export one as a model file.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List {
        #[arg(long)]
        json: bool,
    },
    Export {
        name: String,
        #[arg(long)]
        param: Option<f64>,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ComputeArgs {
    /// JSON job file; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    param: Option<f64>,
    #[arg(long)]
    orbit: Option<usize>,
    /// Signal spec, e.g. `gaussian:center=2,3:width=0.5`, `bump:center=2,3:radius=1`, `zero`, `sig.csv`, `raw:sig.bin`.
    #[arg(long)]
    phi: Option<String>,
    /// Second signal (default: same as --phi).
    #[arg(long)]
    psi: Option<String>,
    /// `default` or `q=MIN:MAX:N[,…];p=MIN:MAX:N[,…]`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_parser = parse_rule)]
    quad_rule: Option<Rule>,
    #[arg(long)]
    quad_points: Option<usize>,
    #[arg(long)]
    quad_half_width: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Output stem; `.csv`, `.bin`/`.json`, `.png` are appended.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Vec<OutputFormat>,
    #[arg(long, value_enum)]
    quantity: Option<Quantity>,
    /// Two displayed axes, indices into (γ_q1..γ_qn, γ_p1..γ_pn).
    #[arg(long, value_delimiter = ',', num_args = 2)]
    slice_axes: Vec<usize>,
    /// Node index for every axis of the slice.
    #[arg(long, value_delimiter = ',')]
    slice_at: Vec<usize>,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown rule '{s}' (gauss-legendre, trapezoid)"))
}

impl ComputeArgs {
    fn job(&self) -> CliResult<JobConfig> {
        let mut cfg = match &self.config {
            Some(p) => JobConfig::from_file(p)?,
            None => JobConfig {
                group: self.group.clone().ok_or_else(|| CliError::Config("--group or --config is required".into()))?,
                param: None,
                orbit: None,
                signal_phi: self.phi.clone().ok_or_else(|| CliError::Config("--phi or --config is required".into()))?,
                signal_psi: None,
                grid: GridConfig::default(),
                quadrature: Default::default(),
                output: Default::default(),
            },
        };
        if let Some(g) = &self.group {
            cfg.group = g.clone();
        }
        if let Some(p) = &self.phi {
            cfg.signal_phi = p.clone();
        }
        cfg.param = self.param.or(cfg.param);
        cfg.orbit = self.orbit.or(cfg.orbit);
        cfg.signal_psi = self.psi.clone().or(cfg.signal_psi);
        if let Some(g) = &self.grid {
            cfg.grid = GridConfig::Spec(g.clone());
        }
        let q = &mut cfg.quadrature;
        q.rule = self.quad_rule.or(q.rule);
        q.points_per_dim = self.quad_points.or(q.points_per_dim);
        q.half_width = self.quad_half_width.or(q.half_width);
        q.rel_tol = self.rel_tol.or(q.rel_tol);
        if let Some(o) = &self.out {
            cfg.output.path = o.clone();
        }
        if !self.format.is_empty() {
            cfg.output.formats = self.format.clone();
        }
        let h = &mut cfg.output.heatmap;
        h.quantity = self.quantity.unwrap_or(h.quantity);
        if let [a, b] = self.slice_axes[..] {
            h.axes = [a, b];
        }
        if !self.slice_at.is_empty() {
            h.fixed = Some(self.slice_at.clone());
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Compute(args) => {
            let summary = compute::run(&args.job()?)?;
            if args.json {
                emit(serde_json::to_string_pretty(&summary)? + "\n")?;
            } else {
                emit(summary)?;
            }
        }
        Command::Verify { group, param, suite, seed, report } => {
            let g = load_group(&group, param)?;
            let r = verify::run(&g, suite, seed)?;
            emit(format!("{r}\n"))?;
            if let Some(p) = report {
                std::fs::write(&p, serde_json::to_string_pretty(&r)? + "\n")?;
            }
            if !r.passed {
                let failed: Vec<String> = r
                    .checks
                    .iter()
                    .filter(|c| c.status == verify::Status::Fail)
                    .map(|c| format!("{}/{}", c.suite, c.name))
                    .collect();
                return Err(CliError::Verify(failed.join(", ")));
            }
        }
        Command::Orbits { group, param, seed, json } => {
            let r = orbits::run(&load_group(&group, param)?, seed)?;
            if json {
                emit(serde_json::to_string_pretty(&r)? + "\n")?;
            } else {
                emit(r)?;
            }
        }
        Command::Catalog { action: CatalogAction::List { json } } => {
            let rows = orbits::catalog_rows();
            if json {
                emit(serde_json::to_string_pretty(&rows)? + "\n")?;
            } else {
                let mut text = format!("{:<18} {:>2} {:>7}  dihedral-cone\n", "name", "n", "orbits");
                for r in rows {
                    let cone = if r.dihedral_cone { "yes" } else { "no" };
                    text += &format!("{:<18} {:>2} {:>7}  {cone}\n", r.name, r.n, r.orbits);
                }
                emit(text)?;
            }
        }
        Command::Catalog { action: CatalogAction::Export { name, param, out } } => {
            let json = catalog::by_name(&name, param)?.model.to_json()?;
            match out {
                Some(p) => std::fs::write(p, json + "\n")?,
                None => emit(json + "\n")?,
            }
        }
    }
    Ok(())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: impl std::fmt::Display) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match write!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
