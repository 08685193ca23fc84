//! PNG heatmaps of 2-D slices through a Wigner grid.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wigner_core::io::wigner_sidecar;
use wigner_core::wigner::{Axis, WignerGrid};

use crate::config::{HeatmapConfig, Quantity};
use crate::error::{CliError, CliResult};

/// A resolved slice: two displayed axes, every other axis pinned to a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub quantity: Quantity,
    pub axes: [usize; 2],
    pub axis_names: [String; 2],
    /// Node index per axis of `(γ_q, γ_p)`; the displayed entries are unused.
    pub fixed: Vec<usize>,
    /// Coordinates of the fixed nodes.
    pub fixed_values: Vec<f64>,
}

fn all_axes(w: &WignerGrid) -> Vec<Axis> {
    w.grid.gamma_q_axes.iter().chain(&w.grid.gamma_p_axes).copied().collect()
}

pub fn axis_name(n: usize, i: usize) -> String {
    if i < n {
        format!("gq{}", i + 1)
    } else {
        format!("gp{}", i - n + 1)
    }
}

fn nearest(axis: &Axis, v: f64) -> usize {
    (0..axis.count).min_by(|&a, &b| (axis.node(a) - v).abs().total_cmp(&(axis.node(b) - v).abs())).unwrap_or(0)
}

/// Default pins: `γ_q` nodes nearest 0 and the in-orbit `γ_p` node nearest the orbit representative.
pub fn default_fixed(w: &WignerGrid) -> Vec<usize> {
    let n = w.grid.n();
    let mut fixed: Vec<usize> = w.grid.gamma_q_axes.iter().map(|a| nearest(a, 0.0)).collect();
    let rep = &w.grid.orbit.representative;
    let best = (0..w.grid.p_len())
        .filter(|&i| w.grid.mask[i])
        .min_by(|&a, &b| {
            let d = |i: usize| w.grid.p_point(i).iter().zip(rep).map(|(x, r)| (x - r).powi(2)).sum::<f64>();
            d(a).total_cmp(&d(b))
        })
        .unwrap_or(0);
    let mut rest = best;
    let mut p_idx = vec![0; n];
    for d in (0..n).rev() {
        p_idx[d] = rest % w.grid.gamma_p_axes[d].count;
        rest /= w.grid.gamma_p_axes[d].count;
    }
    fixed.extend(p_idx);
    fixed
}

pub fn resolve_slice(w: &WignerGrid, cfg: &HeatmapConfig) -> CliResult<Slice> {
    let axes = all_axes(w);
    let dims = axes.len();
    let [a, b] = cfg.axes;
    if a >= dims || b >= dims || a == b {
        return Err(CliError::Config(format!("slice axes {:?} must be two distinct indices below {dims}", cfg.axes)));
    }
    let fixed = match &cfg.fixed {
        Some(f) if f.len() != dims => return Err(CliError::Config(format!("slice needs {dims} fixed indices"))),
        Some(f) => f.clone(),
        None => default_fixed(w),
    };
    for (i, (&f, ax)) in fixed.iter().zip(&axes).enumerate() {
        if i != a && i != b && f >= ax.count {
            return Err(CliError::Config(format!(
                "fixed index {f} is out of range for axis {}",
                axis_name(w.grid.n(), i)
            )));
        }
    }
    let n = w.grid.n();
    Ok(Slice {
        quantity: cfg.quantity,
        axes: cfg.axes,
        axis_names: [axis_name(n, a), axis_name(n, b)],
        fixed_values: fixed.iter().zip(&axes).map(|(&f, ax)| ax.node(f.min(ax.count - 1))).collect(),
        fixed,
    })
}

/// Slice values as rows (second axis) of columns (first axis).
pub fn slice_values(w: &WignerGrid, s: &Slice) -> Vec<Vec<f64>> {
    let axes = all_axes(w);
    let n = w.grid.n();
    let [a, b] = s.axes;
    let mut idx = s.fixed.clone();
    let q_len = w.grid.q_len();
    let flat = |idx: &[usize], axes_part: &[Axis], off: usize| {
        axes_part.iter().enumerate().fold(0, |acc, (d, ax)| acc * ax.count + idx[off + d])
    };
    (0..axes[b].count)
        .map(|j| {
            (0..axes[a].count)
                .map(|i| {
                    idx[a] = i;
                    idx[b] = j;
                    let q = flat(&idx, &w.grid.gamma_q_axes, 0);
                    let p = flat(&idx, &w.grid.gamma_p_axes, n);
                    let v = w.values[p * q_len + q];
                    match s.quantity {
                        Quantity::Abs => v.norm(),
                        Quantity::Re => v.re,
                    }
                })
                .collect()
        })
        .collect()
}

const GLYPH_W: usize = 5;
const GLYPH_H: usize = 7;

fn glyph(c: char) -> [u8; GLYPH_H] {
    match c {
        '0' => [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
        '1' => [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
        '2' => [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
        '3' => [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
        '4' => [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
        '5' => [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
        '6' => [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
        '7' => [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
        '9' => [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
        '-' => [0, 0, 0, 0x1f, 0, 0, 0],
        '.' => [0, 0, 0, 0, 0, 0x0c, 0x0c],
        '+' => [0, 0x04, 0x04, 0x1f, 0x04, 0x04, 0],
        '=' => [0, 0, 0x1f, 0, 0x1f, 0, 0],
        ',' => [0, 0, 0, 0, 0x0c, 0x04, 0x08],
        ':' => [0, 0x0c, 0x0c, 0, 0x0c, 0x0c, 0],
        '|' => [0x04; 7],
        '(' => [0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02],
        ')' => [0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08],
        'R' => [0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0a],
        'a' => [0, 0, 0x0e, 0x01, 0x0f, 0x11, 0x0f],
        'b' => [0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x1e],
        'e' => [0, 0, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
        'g' => [0, 0x0f, 0x11, 0x11, 0x0f, 0x01, 0x0e],
        'i' => [0x04, 0, 0x0c, 0x04, 0x04, 0x04, 0x0e],
        'm' => [0, 0, 0x1a, 0x15, 0x15, 0x11, 0x11],
        'n' => [0, 0, 0x16, 0x19, 0x11, 0x11, 0x11],
        'p' => [0, 0, 0x1e, 0x11, 0x1e, 0x10, 0x10],
        'q' => [0, 0, 0x0f, 0x11, 0x0f, 0x01, 0x01],
        's' => [0, 0, 0x0f, 0x10, 0x0e, 0x01, 0x1e],
        'x' => [0, 0, 0x11, 0x0a, 0x04, 0x0a, 0x11],
        'y' => [0, 0, 0x11, 0x11, 0x0f, 0x01, 0x0e],
        ' ' => [0; 7],
        _ => [0x1f, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1f],
    }
}

struct Canvas {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Self {
        Self { width, height, rgb: vec![255; width * height * 3] }
    }

    fn put(&mut self, x: usize, y: usize, c: [u8; 3]) {
        if x < self.width && y < self.height {
            let i = (y * self.width + x) * 3;
            self.rgb[i..i + 3].copy_from_slice(&c);
        }
    }

    fn fill(&mut self, x0: usize, y0: usize, w: usize, h: usize, c: [u8; 3]) {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                self.put(x, y, c);
            }
        }
    }

    fn text(&mut self, x: usize, y: usize, s: &str) {
        for (k, ch) in s.chars().enumerate() {
            let g = glyph(ch);
            for (r, bits) in g.iter().enumerate() {
                for col in 0..GLYPH_W {
                    if bits >> (GLYPH_W - 1 - col) & 1 == 1 {
                        self.put(x + k * (GLYPH_W + 1) + col, y + r, [0, 0, 0]);
                    }
                }
            }
        }
    }
}

fn text_width(s: &str) -> usize {
    s.chars().count() * (GLYPH_W + 1)
}

fn lerp_colors(stops: &[[u8; 3]], t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    let f = t - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (stops[i][c] as f64 * (1.0 - f) + stops[i + 1][c] as f64 * f).round() as u8;
    }
    out
}

const SEQUENTIAL: [[u8; 3]; 5] = [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]];
const DIVERGING: [[u8; 3]; 3] = [[59, 76, 192], [240, 240, 240], [180, 4, 38]];

fn color(q: Quantity, v: f64, lo: f64, hi: f64) -> [u8; 3] {
    match q {
        Quantity::Abs => lerp_colors(&SEQUENTIAL, if hi > 0.0 { v / hi } else { 0.0 }),
        Quantity::Re => {
            let m = lo.abs().max(hi.abs());
            lerp_colors(&DIVERGING, if m > 0.0 { 0.5 + 0.5 * v / m } else { 0.5 })
        }
    }
}

pub fn label(v: f64) -> String {
    if v == 0.0 || (1e-2..1e3).contains(&v.abs()) {
        format!("{v:.2}")
    } else {
        format!("{v:.2e}")
    }
}

/// Renders the slice to RGB pixels.
fn render(values: &[Vec<f64>], s: &Slice, x_axis: &Axis, y_axis: &Axis) -> Canvas {
    let (nx, ny) = (values[0].len(), values.len());
    let cell = (384 / nx.max(ny)).clamp(1, 24);
    let (pw, ph) = (nx * cell, ny * cell);
    let (left, top, right, bottom) = (64, 24, 90, 34);
    let mut c = Canvas::new(left + pw + right, top + ph + bottom);
    let lo = values.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    for (j, row) in values.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            // second axis grows upward
            c.fill(left + i * cell, top + (ny - 1 - j) * cell, cell, cell, color(s.quantity, v, lo, hi));
        }
    }
    let title = match s.quantity {
        Quantity::Abs => "|W|",
        Quantity::Re => "Re W",
    };
    c.text(left, 8, &format!("{title}  x: {}  y: {}", s.axis_names[0], s.axis_names[1]));
    let y_lab = top + ph + 6;
    c.text(left, y_lab, &label(x_axis.min));
    let xm = label(x_axis.max);
    c.text((left + pw).saturating_sub(text_width(&xm)), y_lab, &xm);
    c.text(left + pw / 2 - text_width(&s.axis_names[0]) / 2, y_lab + 12, &s.axis_names[0]);
    let ym = label(y_axis.max);
    c.text(left.saturating_sub(text_width(&ym) + 4), top, &ym);
    let yl = label(y_axis.min);
    c.text(left.saturating_sub(text_width(&yl) + 4), top + ph - GLYPH_H, &yl);
    c.text(left.saturating_sub(text_width(&s.axis_names[1]) + 4), top + ph / 2, &s.axis_names[1]);
    let bar_x = left + pw + 10;
    for y in 0..ph {
        let t = 1.0 - y as f64 / (ph.max(2) - 1) as f64;
        let v = match s.quantity {
            Quantity::Abs => t * hi,
            Quantity::Re => {
                let m = lo.abs().max(hi.abs());
                (2.0 * t - 1.0) * m
            }
        };
        c.fill(bar_x, top + y, 12, 1, color(s.quantity, v, lo, hi));
    }
    let (bar_top, bar_bottom) = match s.quantity {
        Quantity::Abs => (hi, 0.0),
        Quantity::Re => (lo.abs().max(hi.abs()), -lo.abs().max(hi.abs())),
    };
    c.text(bar_x + 16, top, &label(bar_top));
    c.text(bar_x + 16, top + ph - GLYPH_H, &label(bar_bottom));
    c
}

/// Writes the heatmap with the grid sidecar and the slice description as `iTXt` chunks.
pub fn write_png(w: &WignerGrid, cfg: &HeatmapConfig, path: &Path) -> CliResult<Slice> {
    let s = resolve_slice(w, cfg)?;
    let axes = all_axes(w);
    let values = slice_values(w, &s);
    let canvas = render(&values, &s, &axes[s.axes[0]], &axes[s.axes[1]]);
    let png_err = |e: png::EncodingError| CliError::Config(format!("png: {e}"));
    let file = BufWriter::new(File::create(path)?);
    let mut enc = png::Encoder::new(file, canvas.width as u32, canvas.height as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.add_itxt_chunk("wigner-sidecar".into(), serde_json::to_string(&wigner_sidecar(w))?).map_err(png_err)?;
    enc.add_itxt_chunk("wigner-slice".into(), serde_json::to_string(&s)?).map_err(png_err)?;
    let mut wr = enc.write_header().map_err(png_err)?;
    wr.write_image_data(&canvas.rgb).map_err(png_err)?;
    wr.finish().map_err(png_err)?;
    Ok(s)
}
