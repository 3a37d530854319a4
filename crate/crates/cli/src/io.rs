//! CSV point files.
//!
//! One row per point, a mandatory header naming the coordinate columns
//! `x0..x{d-1}` (embeddings use `y0..`), then an optional `label` column.
//! Values are written with 17 significant digits so that reading a file back
//! reproduces every `f64` exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sphere_sne::Matrix64;

use crate::error::{CliError, Result};

/// Points and optional labels as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub points: Matrix64,
    pub labels: Option<Vec<usize>>,
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        CliError::validation(format!("{}: {e}", path.display()))
    }
}

pub fn read_points(path: &Path) -> Result<PointFile> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let has_label = headers.iter().next_back() == Some("label");
    let dim = headers.len() - usize::from(has_label);
    if dim == 0 {
        return Err(CliError::validation(format!("{}: no coordinate columns", path.display())));
    }
    for (i, h) in headers.iter().take(dim).enumerate() {
        let ok = h.len() > 1 && matches!(&h[..1], "x" | "y") && h[1..] == i.to_string();
        if !ok {
            return Err(CliError::validation(format!(
                "{}: column {i} is named {h:?}, expected x{i}",
                path.display()
            )));
        }
    }

    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = row + 2;
        for field in record.iter().take(dim) {
            let v: f64 = field.parse().map_err(|_| {
                CliError::validation(format!("{}:{line}: {field:?} is not a number", path.display()))
            })?;
            if !v.is_finite() {
                return Err(CliError::validation(format!("{}:{line}: non-finite value", path.display())));
            }
            data.push(v);
        }
        if has_label {
            let field = &record[dim];
            let l: usize = field.parse().map_err(|_| {
                CliError::validation(format!("{}:{line}: label {field:?} is not a nonnegative integer", path.display()))
            })?;
            labels.push(l);
        }
    }
    let rows = data.len() / dim;
    let points = Matrix64::from_vec(rows, dim, data)?;
    Ok(PointFile { points, labels: has_label.then_some(labels) })
}

/// Writes `points` (and `labels`, if any) with columns `{prefix}0..`.
pub fn write_points(path: &Path, prefix: &str, points: &Matrix64, labels: Option<&[usize]>) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != points.rows() {
            return Err(CliError::validation(format!(
                "{} labels for {} points",
                l.len(),
                points.rows()
            )));
        }
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    let mut header: Vec<String> = (0..points.cols()).map(|j| format!("{prefix}{j}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    writer.write_record(&header).map_err(|e| csv_error(path, e))?;
    let mut record = Vec::with_capacity(header.len());
    for (i, row) in points.iter_rows().enumerate() {
        record.clear();
        record.extend(row.iter().map(|&v| format_value(v)));
        if let Some(l) = labels {
            record.push(l[i].to_string());
        }
        writer.write_record(&record).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

/// `iteration,kl` rows, one per recorded iteration.
pub fn write_loss_trace(path: &Path, trace: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut body = String::from("iteration,kl\n");
    for (t, kl) in trace.iter().enumerate() {
        body.push_str(&format!("{t},{}\n", format_value(*kl)));
    }
    w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `<out>.<suffix>` next to `out`, e.g. `emb.csv` → `emb.csv.manifest.json`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}
