//! Serialized artifacts: pretty JSON for structured reports and CSV for
//! sweeps. Output is byte-identical for identical inputs.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{fmt_decimal, Exact};

pub const SWEEP_HEADER: [&str; 8] = [
    "t",
    "quantum_cost",
    "classical_best",
    "window",
    "M_X",
    "M_Z",
    "t0",
    "certified",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// One sweep row. `classical_best` is `None` when the search hit its budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: i64,
    pub quantum_cost: Exact,
    pub classical_best: Option<Exact>,
    pub window: u32,
    #[serde(rename = "M_X")]
    pub mx: f64,
    #[serde(rename = "M_Z")]
    pub mz: f64,
    pub t0: f64,
    pub certified: bool,
}

/// Fixed 12-digit rendering with trailing zeros trimmed.
pub fn fmt_f64(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            fmt_decimal(&r.quantum_cost.0),
            r.classical_best.as_ref().map(|c| fmt_decimal(&c.0)).unwrap_or_default(),
            r.window.to_string(),
            fmt_f64(r.mx),
            fmt_f64(r.mz),
            fmt_f64(r.t0),
            r.certified.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn emit_sweep(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => sweep_csv(rows),
        Format::Json => Ok(to_json(&rows)),
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_artifact(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
