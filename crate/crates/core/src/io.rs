//! File formats: Wigner grid export (CSV, raw + JSON sidecar) and sampled-signal import.
//!
//! Raw files are little-endian `f64` streams. A Wigner grid stores `(Re, Im)` pairs
//! in `values[p * q_len + q]` order; a signal grid stores `(Re, Im)` pairs with the
//! last coordinate axis fastest.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::representation::SampledGrid;
use crate::wigner::{PhaseSpaceGrid, WignerGrid, WignerMeta};
use crate::{Error, Result};

pub const WIGNER_RAW_FORMAT: &str = "wigner-rawgrid";
pub const SIGNAL_RAW_FORMAT: &str = "signal-rawgrid";
pub const FORMAT_VERSION: u32 = 1;

/// Sidecar of a raw Wigner grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerSidecar {
    pub format: String,
    pub version: u32,
    pub byte_order: String,
    /// Number of `f64` words in the raw file (`2 · p_len · q_len`).
    pub words: usize,
    pub grid: PhaseSpaceGrid,
    pub mixing: Vec<bool>,
    pub meta: WignerMeta,
}

/// Sidecar of a raw sampled signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSidecar {
    pub format: String,
    pub version: u32,
    pub byte_order: String,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub counts: Vec<usize>,
}

fn complex_to_bytes(values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 16);
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn bytes_to_complex(bytes: &[u8], expected: usize) -> Result<Vec<Complex64>> {
    if bytes.len() != expected * 16 {
        return Err(Error::Format(format!("raw file holds {} bytes, expected {}", bytes.len(), expected * 16)));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8-byte chunk"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8-byte chunk"));
            Complex64::new(re, im)
        })
        .collect())
}

fn check_header(format: &str, version: u32, byte_order: &str, want: &str) -> Result<()> {
    if format != want || version != FORMAT_VERSION || byte_order != "little-endian" {
        return Err(Error::Format(format!(
            "expected {want} v{FORMAT_VERSION} little-endian, found {format} v{version} {byte_order}"
        )));
    }
    Ok(())
}

/// CSV with columns `gq1..gqn, gp1..gpn, re, im, mask`; values in shortest round-trip
/// scientific notation, masked-out rows carry zeros.
pub fn write_wigner_csv<W: Write>(w: &WignerGrid, out: W) -> Result<()> {
    let n = w.grid.n();
    let mut wr = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=n).map(|i| format!("gq{i}")).collect();
    header.extend((1..=n).map(|i| format!("gp{i}")));
    header.extend(["re", "im", "mask"].map(String::from));
    wr.write_record(&header).map_err(csv_err)?;
    let q_len = w.grid.q_len();
    let mut rec: Vec<String> = Vec::with_capacity(2 * n + 3);
    for p in 0..w.grid.p_len() {
        let gp = w.grid.p_point(p);
        for q in 0..q_len {
            rec.clear();
            rec.extend(w.grid.q_point(q).iter().map(f64::to_string));
            rec.extend(gp.iter().map(f64::to_string));
            let v = w.values[p * q_len + q];
            rec.push(format!("{:e}", v.re));
            rec.push(format!("{:e}", v.im));
            rec.push(u8::from(w.grid.mask[p]).to_string());
            wr.write_record(&rec).map_err(csv_err)?;
        }
    }
    wr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

pub fn wigner_sidecar(w: &WignerGrid) -> WignerSidecar {
    WignerSidecar {
        format: WIGNER_RAW_FORMAT.into(),
        version: FORMAT_VERSION,
        byte_order: "little-endian".into(),
        words: 2 * w.values.len(),
        grid: w.grid.clone(),
        mixing: w.mixing.clone(),
        meta: w.meta.clone(),
    }
}

/// Writes the raw values to `bin` and the pretty-printed sidecar to `json`.
pub fn write_wigner_raw(w: &WignerGrid, bin: &Path, json: &Path) -> Result<()> {
    fs::write(bin, complex_to_bytes(&w.values))?;
    fs::write(json, serde_json::to_string_pretty(&wigner_sidecar(w))? + "\n")?;
    Ok(())
}

pub fn read_wigner_raw(bin: &Path, json: &Path) -> Result<WignerGrid> {
    let side: WignerSidecar = serde_json::from_str(&fs::read_to_string(json)?)?;
    check_header(&side.format, side.version, &side.byte_order, WIGNER_RAW_FORMAT)?;
    let len = side.grid.p_len() * side.grid.q_len();
    if side.words != 2 * len || side.mixing.len() != side.grid.p_len() || side.grid.mask.len() != side.grid.p_len() {
        return Err(Error::Format("sidecar geometry is inconsistent".into()));
    }
    let values = bytes_to_complex(&fs::read(bin)?, len)?;
    Ok(WignerGrid { grid: side.grid, values, mixing: side.mixing, meta: side.meta, signals: None })
}

pub fn write_signal_raw(g: &SampledGrid, bin: &Path, json: &Path) -> Result<()> {
    let side = SignalSidecar {
        format: SIGNAL_RAW_FORMAT.into(),
        version: FORMAT_VERSION,
        byte_order: "little-endian".into(),
        lo: g.lo.clone(),
        hi: g.hi.clone(),
        counts: g.counts.clone(),
    };
    fs::write(bin, complex_to_bytes(&g.values))?;
    fs::write(json, serde_json::to_string_pretty(&side)? + "\n")?;
    Ok(())
}

pub fn read_signal_raw(bin: &Path, json: &Path) -> Result<SampledGrid> {
    let side: SignalSidecar = serde_json::from_str(&fs::read_to_string(json)?)?;
    check_header(&side.format, side.version, &side.byte_order, SIGNAL_RAW_FORMAT)?;
    let total: usize = side.counts.iter().product();
    let values = bytes_to_complex(&fs::read(bin)?, total)?;
    SampledGrid::new(side.lo, side.hi, side.counts, values)
}

/// Reads a signal sampled on a regular grid from CSV rows `k1..kn, re, im`.
///
/// A non-numeric first row is taken as a header. Rows may come in any order but
/// must cover every node of the grid exactly once.
pub fn read_signal_csv<R: Read>(input: R) -> Result<SampledGrid> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Format(format!("csv row {}: {e}", i + 1))),
        }
    }
    let width = rows.first().map(Vec::len).ok_or_else(|| Error::Format("csv holds no data rows".into()))?;
    if width < 3 || rows.iter().any(|r| r.len() != width) {
        return Err(Error::Format("csv rows need the same number (≥ 3) of columns".into()));
    }
    let n = width - 2;
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(n);
    for d in 0..n {
        let mut v: Vec<f64> = rows.iter().map(|r| r[d]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        if v.len() < 2 {
            return Err(Error::Format(format!("coordinate {} takes fewer than two values", d + 1)));
        }
        let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
        if v.iter().enumerate().any(|(i, x)| (x - (v[0] + i as f64 * step)).abs() > 1e-9 * (1.0 + x.abs())) {
            return Err(Error::Format(format!("coordinate {} is not uniformly spaced", d + 1)));
        }
        axes.push(v);
    }
    let counts: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = counts.iter().product();
    if rows.len() != total {
        return Err(Error::Format(format!("csv has {} rows but the grid has {total} nodes", rows.len())));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    let mut seen = vec![false; total];
    for r in &rows {
        let mut idx = 0;
        for d in 0..n {
            let i = axes[d].binary_search_by(|x| x.total_cmp(&r[d])).expect("value taken from this column");
            idx = idx * counts[d] + i;
        }
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Format(format!("duplicate grid node {:?}", &r[..n])));
        }
        values[idx] = Complex64::new(r[n], r[n + 1]);
    }
    let lo = axes.iter().map(|a| a[0]).collect();
    let hi = axes.iter().map(|a| a[a.len() - 1]).collect();
    SampledGrid::new(lo, hi, counts, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        std::env::temp_dir().join(format!("wigner-io-{}-{name}", std::process::id()))
    }

    #[test]
    fn signal_csv_any_order_with_header() {
        let text = "k1,k2,re,im\n1,3,0.5,0\n0,2,1,-1\n1,2,0.25,2\n0,3,0,0\n";
        let g = read_signal_csv(text.as_bytes()).unwrap();
        assert_eq!(g.counts, vec![2, 2]);
        assert_eq!(g.values[1], Complex64::new(0.0, 0.0));
        assert_eq!(g.values[2], Complex64::new(0.25, 2.0));
        assert_eq!(g.eval(&[0.5, 2.5]), Complex64::new(0.4375, 0.25));
    }

    #[test]
    fn signal_csv_rejects_holes() {
        assert!(read_signal_csv("0,0,1,0\n1,0,1,0\n0,1,1,0\n".as_bytes()).is_err());
        assert!(read_signal_csv("0,0,1,0\n1,0,1,0\n0,1,1,0\n0,1,1,0\n".as_bytes()).is_err());
        assert!(read_signal_csv("0,0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn signal_raw_round_trip() {
        let g = SampledGrid::sample(vec![0.0, 1.0], vec![1.0, 2.0], vec![3, 4], |k| Complex64::new(k[0], k[1].sin()))
            .unwrap();
        let (b, j) = (tmp("sig.bin"), tmp("sig.json"));
        write_signal_raw(&g, &b, &j).unwrap();
        let back = read_signal_raw(&b, &j).unwrap();
        assert_eq!(back.values, g.values);
        assert_eq!(back.counts, g.counts);
        fs::write(&b, [0u8; 8]).unwrap();
        assert!(matches!(read_signal_raw(&b, &j), Err(Error::Format(_))));
        let _ = (fs::remove_file(b), fs::remove_file(j));
    }
}
