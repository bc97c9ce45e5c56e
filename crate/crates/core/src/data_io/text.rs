//! CSV embeddings and label sidecars.
//!
//! An embeddings CSV may start with one header row, detected by any cell that
//! does not parse as a number. With a header, a column named `row_id`
//! supplies row ids and a column named `label` supplies 0/1 labels; every
//! other column is a feature. Without a header every column is a feature and
//! row ids are the zero-based row numbers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::EmbeddingMatrix;
use crate::error::{MsdeError, Result};

/// Shortest text that round-trips: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| MsdeError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn read_records(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| MsdeError::load(path, format!("line {}: {e}", i + 1)))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        out.push(rec);
    }
    Ok(out)
}

fn is_numeric(cell: &str) -> bool {
    cell.parse::<f64>().is_ok()
}

pub fn read_csv(path: &Path) -> Result<EmbeddingMatrix> {
    let records = read_records(path)?;
    let Some(first) = records.first() else {
        return Err(MsdeError::load(path, "file is empty"));
    };
    let has_header = first.iter().any(|c| !is_numeric(c));
    let (id_col, label_col, width) = if has_header {
        let find = |name: &str| first.iter().position(|c| c.eq_ignore_ascii_case(name));
        (find("row_id"), find("label"), first.len())
    } else {
        (None, None, first.len())
    };
    let feature_cols: Vec<usize> = (0..width)
        .filter(|c| Some(*c) != id_col && Some(*c) != label_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(MsdeError::load(path, "dimension 0: no feature columns"));
    }
    let body = &records[usize::from(has_header)..];
    if body.is_empty() {
        return Err(MsdeError::load(path, "no data rows"));
    }

    let dim = feature_cols.len();
    let mut values = Vec::with_capacity(body.len() * dim);
    let mut ids = Vec::with_capacity(body.len());
    let mut labels = label_col.map(|_| Vec::with_capacity(body.len()));
    for (r, rec) in body.iter().enumerate() {
        if rec.len() != width {
            return Err(MsdeError::load(
                path,
                format!("ragged row {r}: {} columns, expected {width}", rec.len()),
            ));
        }
        for &c in &feature_cols {
            let cell = &rec[c];
            let v: f64 = cell.parse().map_err(|_| {
                MsdeError::load(path, format!("row {r} column {c}: {cell:?} is not a number"))
            })?;
            if !v.is_finite() {
                return Err(MsdeError::load(
                    path,
                    format!("row {r} column {c}: non-finite value {cell:?}"),
                ));
            }
            values.push(v);
        }
        ids.push(match id_col {
            Some(c) => rec[c].to_string(),
            None => r.to_string(),
        });
        if let (Some(c), Some(l)) = (label_col, labels.as_mut()) {
            l.push(parse_label(&rec[c]).map_err(|d| {
                MsdeError::load(path, format!("row {r} column {c}: {d}"))
            })?);
        }
    }
    EmbeddingMatrix::new(values, dim, ids, labels).map_err(|e| MsdeError::load(path, e.to_string()))
}

fn parse_label(cell: &str) -> std::result::Result<u8, String> {
    match cell.parse::<f64>() {
        Ok(0.0) => Ok(0),
        Ok(1.0) => Ok(1),
        _ => Err(format!("label {cell:?} is not 0 or 1")),
    }
}

/// Header `row_id,f0,..,f{d-1}[,label]`, values at 17 significant digits.
pub fn write_csv(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let io = |e| MsdeError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let mut header = String::from("row_id");
    for j in 0..m.dim() {
        header.push_str(&format!(",f{j}"));
    }
    if m.labels().is_some() {
        header.push_str(",label");
    }
    writeln!(w, "{header}").map_err(io)?;
    for i in 0..m.n_samples() {
        let mut line = m.row_ids()[i].clone();
        for v in m.row(i) {
            line.push(',');
            line.push_str(&fmt_f64(*v));
        }
        if let Some(l) = m.labels() {
            line.push_str(&format!(",{}", l[i]));
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// `row_id,label` pairs; a header row is optional.
pub fn read_label_sidecar(path: &Path) -> Result<Vec<(String, u8)>> {
    let records = read_records(path)?;
    let mut out = Vec::with_capacity(records.len());
    for (r, rec) in records.iter().enumerate() {
        if rec.len() != 2 {
            return Err(MsdeError::load(
                path,
                format!("row {r}: expected 2 columns (row_id,label), got {}", rec.len()),
            ));
        }
        if r == 0 && rec[0].eq_ignore_ascii_case("row_id") {
            continue;
        }
        let label = parse_label(&rec[1])
            .map_err(|d| MsdeError::load(path, format!("row {r} column 1: {d}")))?;
        out.push((rec[0].to_string(), label));
    }
    Ok(out)
}

pub fn write_label_sidecar(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let io = |e| MsdeError::io(path, e);
    let labels = m
        .labels()
        .ok_or_else(|| MsdeError::InvalidMatrix("matrix has no labels to write".into()))?;
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "row_id,label").map_err(io)?;
    for (id, l) in m.row_ids().iter().zip(labels) {
        writeln!(w, "{id},{l}").map_err(io)?;
    }
    w.flush().map_err(io)
}
