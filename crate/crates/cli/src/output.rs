//! Report serialization and file placement.
//!
//! CSV: fixed column order, header always present, numbers with 17
//! significant digits, LF line endings. JSON: pretty-printed arrays that
//! re-serialize to the same bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bernstein_ops::{BoundReport, ConvergenceReport};
use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, Result};

pub const BOUND_COLUMNS: [&str; 10] =
    ["theorem", "function", "n", "scheme", "x", "lhs", "rhs", "margin", "moduli_exact", "status"];
pub const CONVERGENCE_COLUMNS: [&str; 6] = ["operator", "function", "x", "n", "scaled_error", "fitted_rate"];
pub const SWEEP_COLUMNS: [&str; 8] = ["operator", "function", "scheme", "n", "x", "value", "error", "scaled_error"];

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map(number).unwrap_or_default()
}

/// File-name-safe form of a scheme label (`a1=1/n` → `a1=1_n`).
pub fn slug(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || "=-+.".contains(c) { c } else { '_' }).collect()
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))
}

pub fn bounds_csv(reports: &[BoundReport]) -> Result<Vec<u8>> {
    let rows = reports.iter().flat_map(|r| {
        let head =
            [r.theorem.name().to_string(), r.function.clone(), r.n.to_string(), r.scheme.clone().unwrap_or_default()];
        let tail = [r.moduli_exact.to_string(), r.status.name().to_string()];
        let body: Vec<[String; 4]> = if r.x_grid.is_empty() {
            vec![Default::default()]
        } else {
            (0..r.x_grid.len())
                .map(|i| [number(r.x_grid[i]), number(r.lhs[i]), number(r.rhs[i]), number(r.margin[i])])
                .collect()
        };
        body.into_iter().map(move |b| head.iter().chain(&b).chain(&tail).cloned().collect())
    });
    csv_table(&BOUND_COLUMNS, rows)
}

pub fn convergence_csv(reports: &[ConvergenceReport]) -> Result<Vec<u8>> {
    let rows = reports.iter().flat_map(|r| {
        r.n_list.iter().zip(&r.scaled_error).map(move |(n, e)| {
            vec![
                r.operator.to_string(),
                r.function.clone(),
                number(r.x),
                n.to_string(),
                number(*e),
                optional(r.fitted_rate),
            ]
        })
    });
    csv_table(&CONVERGENCE_COLUMNS, rows)
}

/// One row of `sweep` output.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub operator: String,
    pub function: String,
    pub scheme: Option<String>,
    pub n: u32,
    pub x: f64,
    pub value: f64,
    /// `L_n f(x) - f(x)`.
    pub error: f64,
    /// `n (L_n f(x) - f(x))`.
    pub scaled_error: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    csv_table(
        &SWEEP_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.operator.clone(),
                r.function.clone(),
                r.scheme.clone().unwrap_or_default(),
                r.n.to_string(),
                number(r.x),
                number(r.value),
                number(r.error),
                number(r.scaled_error),
            ]
        }),
    )
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Serialize(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Where report bodies go: a directory of files, or stdout in sequence.
#[derive(Debug, Clone)]
pub enum Sink {
    Stdout,
    Dir(PathBuf),
}

impl Sink {
    pub fn new(out: Option<&Path>) -> Result<Self> {
        match out {
            None => Ok(Sink::Stdout),
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
                Ok(Sink::Dir(dir.to_path_buf()))
            }
        }
    }

    /// Writes `body` as `{stem}.{ext}`; returns the path when a file was written.
    pub fn emit(&self, stem: &str, format: Format, body: &[u8]) -> Result<Option<PathBuf>> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(body)
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
                Ok(None)
            }
            Sink::Dir(dir) => {
                let path = dir.join(format!("{stem}.{}", format.extension()));
                fs::write(&path, body).map_err(|source| CliError::Io { path: path.clone(), source })?;
                Ok(Some(path))
            }
        }
    }
}
