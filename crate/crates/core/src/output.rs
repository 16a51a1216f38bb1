//! CSV tables: comma-separated, header row, LF endings, shortest
//! round-trip float formatting (byte-identical for identical inputs).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::classical::ThresholdResult;
use crate::exponent::{ComparisonRow, FitResult, ScanPoint, ScanSeries, SemiclassicalF0};
use crate::semiclassical::{ExponentRecord, F0Result};
use crate::{Error, Result};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub quantity: String,
    pub value: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub steps: usize,
    pub dt: f64,
}

impl ThresholdRow {
    pub fn new(quantity: &str, r: &ThresholdResult) -> Self {
        Self { quantity: quantity.into(), value: r.value, bracket_lo: r.bracket.0, bracket_hi: r.bracket.1, steps: r.steps, dt: r.dt }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub epsilon: f64,
    pub nu: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub theta: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "two_im_S0")]
    pub two_im_s0: f64,
    pub residual_norm: f64,
    #[serde(rename = "nodes_B")]
    pub nodes_b: usize,
    #[serde(rename = "nodes_C")]
    pub nodes_c: usize,
    #[serde(rename = "nodes_DE")]
    pub nodes_de: usize,
    pub provenance: String,
}

impl From<&ExponentRecord> for RecordRow {
    fn from(r: &ExponentRecord) -> Self {
        Self {
            epsilon: r.epsilon,
            nu: r.nu,
            t: r.t,
            theta: r.theta,
            f: r.f,
            two_im_s0: r.two_im_s0,
            residual_norm: r.residual_norm,
            nodes_b: r.nodes_b,
            nodes_c: r.nodes_c,
            nodes_de: r.nodes_de,
            provenance: r.provenance.tag().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F0Row {
    pub epsilon: f64,
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "F0_err")]
    pub f0_err: f64,
    #[serde(rename = "F0_linear")]
    pub f0_linear: f64,
    #[serde(rename = "F0_quadratic")]
    pub f0_quadratic: f64,
    pub nu_min: f64,
    pub points: usize,
}

impl From<&F0Result> for F0Row {
    fn from(r: &F0Result) -> Self {
        let x = &r.extrapolation;
        Self { epsilon: r.epsilon, f0: x.f0, f0_err: x.error, f0_linear: x.linear, f0_quadratic: x.quadratic, nu_min: x.nu_min, points: x.points }
    }
}

impl From<&F0Row> for SemiclassicalF0 {
    fn from(r: &F0Row) -> Self {
        Self { epsilon: r.epsilon, f0: r.f0, err: r.f0_err }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub epsilon: f64,
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "F0_err")]
    pub f0_err: f64,
    pub slope: f64,
    pub intercept: f64,
    pub slope_err: f64,
    pub intercept_err: f64,
    pub r2: f64,
    pub inv_g2_min: f64,
    pub inv_g2_max: f64,
    pub points: usize,
    pub jackknife_shift: f64,
    pub runs_p: f64,
    pub non_exponential: bool,
}

impl From<&FitResult> for FitRow {
    fn from(f: &FitResult) -> Self {
        Self {
            epsilon: f.epsilon,
            f0: f.f0,
            f0_err: f.f0_err,
            slope: f.slope,
            intercept: f.intercept,
            slope_err: f.slope_err,
            intercept_err: f.intercept_err,
            r2: f.r2,
            inv_g2_min: f.inv_g2_min,
            inv_g2_max: f.inv_g2_max,
            points: f.points,
            jackknife_shift: f.jackknife_shift,
            runs_p: f.runs_p,
            non_exponential: f.non_exponential,
        }
    }
}

impl From<&FitRow> for FitResult {
    fn from(r: &FitRow) -> Self {
        Self {
            epsilon: r.epsilon,
            slope: r.slope,
            intercept: r.intercept,
            slope_err: r.slope_err,
            intercept_err: r.intercept_err,
            r2: r.r2,
            f0: r.f0,
            f0_err: r.f0_err,
            inv_g2_min: r.inv_g2_min,
            inv_g2_max: r.inv_g2_max,
            points: r.points,
            jackknife_shift: r.jackknife_shift,
            runs_p: r.runs_p,
            non_exponential: r.non_exponential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCsvRow {
    pub epsilon: f64,
    #[serde(rename = "F0_semi")]
    pub f0_semi: f64,
    #[serde(rename = "F0_semi_err")]
    pub f0_semi_err: f64,
    #[serde(rename = "F0_quantum")]
    pub f0_quantum: f64,
    #[serde(rename = "F0_quantum_err")]
    pub f0_quantum_err: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub within: bool,
}

impl From<&ComparisonRow> for ComparisonCsvRow {
    fn from(r: &ComparisonRow) -> Self {
        Self {
            epsilon: r.epsilon,
            f0_semi: r.f0_semi,
            f0_semi_err: r.f0_semi_err,
            f0_quantum: r.f0_quantum,
            f0_quantum_err: r.f0_quantum_err,
            abs_diff: r.abs_diff,
            rel_diff: r.rel_diff,
            within: r.within,
        }
    }
}

/// Serializes any row type with a header.
pub fn write_rows<W: Write, R: Serialize>(w: W, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut out = writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Like `write_rows`, but an empty table still gets its header.
pub fn write_table<W: Write, R: Serialize>(w: W, columns: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut out = writer(w);
    let mut empty = true;
    for r in rows {
        out.serialize(r)?;
        empty = false;
    }
    if empty {
        out.write_record(columns)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(r).deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub const RECORD_COLUMNS: &[&str] = &["epsilon", "nu", "T", "theta", "F", "two_im_S0", "residual_norm", "nodes_B", "nodes_C", "nodes_DE", "provenance"];
pub const F0_COLUMNS: &[&str] = &["epsilon", "F0", "F0_err", "F0_linear", "F0_quadratic", "nu_min", "points"];
pub const FIT_COLUMNS: &[&str] = &[
    "epsilon", "F0", "F0_err", "slope", "intercept", "slope_err", "intercept_err", "r2", "inv_g2_min", "inv_g2_max", "points", "jackknife_shift", "runs_p", "non_exponential",
];
pub const COMPARISON_COLUMNS: &[&str] = &["epsilon", "F0_semi", "F0_semi_err", "F0_quantum", "F0_quantum_err", "abs_diff", "rel_diff", "within"];
const SOLVE_COLUMNS: &[&str] = &["E", "g", "epsilon", "n_in", "inv_g2", "T_total", "ln_T_total", "R_total", "unitarity_defect", "a", "N_X", "N0", "basis_change", "excluded"];

/// One row per quantum solve; T_0..T_kmax padded to the widest row.
pub fn write_solves<W: Write>(w: W, series: &[ScanSeries]) -> Result<()> {
    let kmax = series.iter().flat_map(|s| &s.points).map(|p| p.transmission.len()).max().unwrap_or(0);
    let mut out = writer(w);
    let mut header: Vec<String> = SOLVE_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..kmax).map(|k| format!("T_{k}")));
    out.write_record(&header)?;
    for s in series {
        for p in &s.points {
            let mut row = vec![
                p.energy.to_string(),
                p.g.to_string(),
                s.epsilon.to_string(),
                "0".to_string(),
                p.inv_g2.to_string(),
                p.t0.to_string(),
                p.ln_t0.to_string(),
                p.r_total.to_string(),
                p.unitarity_defect.to_string(),
                p.a.to_string(),
                p.n_x.to_string(),
                p.n0.to_string(),
                p.basis_change.map(|v| v.to_string()).unwrap_or_default(),
                p.excluded.clone().unwrap_or_default(),
            ];
            row.extend((0..kmax).map(|k| p.transmission.get(k).map(|v| v.to_string()).unwrap_or_default()));
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a per-solve table back into series grouped by ε, in first-seen order.
pub fn read_solves<R: Read>(r: R) -> Result<Vec<ScanSeries>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::Config(format!("solve table lacks column {name}")));
    let idx: Vec<usize> = SOLVE_COLUMNS.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let t_cols: Vec<usize> = (0..).map_while(|k| headers.iter().position(|h| h == format!("T_{k}"))).collect();
    let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?} in solve table"))) };
    let int = |s: &str| -> Result<usize> { s.parse::<usize>().map_err(|_| Error::Config(format!("bad integer {s:?} in solve table"))) };
    let mut out: Vec<ScanSeries> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| &rec[idx[i]];
        let epsilon = num(f(2))?;
        let point = ScanPoint {
            energy: num(f(0))?,
            g: num(f(1))?,
            inv_g2: num(f(4))?,
            t0: num(f(5))?,
            ln_t0: num(f(6))?,
            r_total: num(f(7))?,
            unitarity_defect: num(f(8))?,
            a: num(f(9))?,
            n_x: int(f(10))?,
            n0: int(f(11))?,
            basis_change: if f(12).is_empty() { None } else { Some(num(f(12))?) },
            excluded: if f(13).is_empty() { None } else { Some(f(13).to_string()) },
            transmission: t_cols.iter().map(|&c| &rec[c]).filter(|s| !s.is_empty()).map(num).collect::<Result<_>>()?,
        };
        match out.iter_mut().find(|s| s.epsilon == epsilon) {
            Some(s) => s.points.push(point),
            None => out.push(ScanSeries { epsilon, points: vec![point] }),
        }
    }
    Ok(out)
}
