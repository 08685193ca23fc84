use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use wigner_core::io::{write_wigner_csv, write_wigner_raw};
use wigner_core::wigner::{wigner_grid, WignerGrid};

use crate::config::{JobConfig, OutputFormat};
use crate::error::CliResult;
use crate::heatmap::{self, Slice};

#[derive(Debug, Clone, Serialize)]
pub struct ComputeSummary {
    pub group: String,
    pub orbit: usize,
    pub q_nodes: usize,
    pub p_nodes: usize,
    pub p_nodes_in_orbit: usize,
    pub quadrature_points: usize,
    pub max_abs: f64,
    /// `Σ |W|²·σ⁻¹` times the cell volume.
    pub grid_norm_sq: f64,
    pub mixing_nodes: usize,
    pub tail_ratio: f64,
    pub files: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<Slice>,
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn write_outputs(w: &WignerGrid, cfg: &JobConfig) -> CliResult<(Vec<PathBuf>, Option<Slice>)> {
    let stem = &cfg.output.path;
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut files = Vec::new();
    let mut slice = None;
    for f in &cfg.output.formats {
        match f {
            OutputFormat::Csv => {
                let p = with_ext(stem, "csv");
                write_wigner_csv(w, BufWriter::new(File::create(&p)?))?;
                files.push(p);
            }
            OutputFormat::Rawgrid => {
                let (b, j) = (with_ext(stem, "bin"), with_ext(stem, "json"));
                write_wigner_raw(w, &b, &j)?;
                files.extend([b, j]);
            }
            OutputFormat::Png => {
                let p = with_ext(stem, "png");
                slice = Some(heatmap::write_png(w, &cfg.output.heatmap, &p)?);
                files.push(p);
            }
        }
    }
    Ok((files, slice))
}

pub fn run(cfg: &JobConfig) -> CliResult<ComputeSummary> {
    let job = cfg.resolve()?;
    let w = wigner_grid(&job.phi, &job.psi, &job.grid, &job.quadrature)?;
    let (files, slice) = write_outputs(&w, cfg)?;
    Ok(ComputeSummary {
        group: job.group.model.name.clone(),
        orbit: job.grid.orbit.label,
        q_nodes: job.grid.q_len(),
        p_nodes: job.grid.p_len(),
        p_nodes_in_orbit: job.grid.mask.iter().filter(|&&m| m).count(),
        quadrature_points: w.meta.quadrature.points_per_dim,
        max_abs: w.max_abs(),
        grid_norm_sq: w.grid_norm_sq(&job.group.model),
        mixing_nodes: w.meta.mixing_nodes,
        tail_ratio: w.meta.tail_ratio,
        files,
        slice,
    })
}

impl std::fmt::Display for ComputeSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "group            {}", self.group)?;
        writeln!(f, "orbit            {}", self.orbit)?;
        writeln!(
            f,
            "grid             {} γ_q × {} γ_p nodes ({} in orbit)",
            self.q_nodes, self.p_nodes, self.p_nodes_in_orbit
        )?;
        writeln!(f, "quadrature       {} points per dimension", self.quadrature_points)?;
        writeln!(f, "max |W|          {:.6e}", self.max_abs)?;
        writeln!(f, "grid norm²       {:.6e}", self.grid_norm_sq)?;
        writeln!(f, "tail ratio       {:.3e}", self.tail_ratio)?;
        writeln!(
            f,
            "mixing           {}",
            if self.mixing_nodes == 0 { "none".to_string() } else { format!("{} γ_p nodes", self.mixing_nodes) }
        )?;
        if let Some(s) = &self.slice {
            writeln!(
                f,
                "heatmap slice    x = {}, y = {}, fixed nodes {:?}",
                s.axis_names[0], s.axis_names[1], s.fixed
            )?;
        }
        for p in &self.files {
            writeln!(f, "wrote            {}", p.display())?;
        }
        Ok(())
    }
}
