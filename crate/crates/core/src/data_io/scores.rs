use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::text::fmt_f64;
use crate::error::{MsdeError, Result};
use crate::scoring::ScoreReport;

pub const SCORES_HEADER: &str = "row_id,label,raw_score,normalized_score";

/// One line of a scores CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub row_id: String,
    pub label: u8,
    pub raw: f64,
    pub normalized: f64,
}

/// Write `row_id,label,raw_score,normalized_score`, one line per test row in
/// test-matrix order.
pub fn save_scores(report: &ScoreReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |e| MsdeError::io(path, e);
    let n = report.raw.len();
    if report.normalized.len() != n || report.labels.len() != n || report.row_ids.len() != n {
        return Err(MsdeError::shape(
            "data_io",
            format!(
                "score report columns disagree: {} ids, {} labels, {} raw, {} normalized",
                report.row_ids.len(),
                report.labels.len(),
                n,
                report.normalized.len()
            ),
        ));
    }
    if n == 0 {
        log::warn!("writing an empty score file to {}", path.display());
    }
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "{SCORES_HEADER}").map_err(io)?;
    for i in 0..n {
        writeln!(
            w,
            "{},{},{},{}",
            report.row_ids[i],
            report.labels[i],
            fmt_f64(report.raw[i]),
            fmt_f64(report.normalized[i])
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<Vec<ScoreRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| MsdeError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = rdr
        .headers()
        .map_err(|e| MsdeError::load(path, e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != SCORES_HEADER {
        return Err(MsdeError::load(
            path,
            format!("expected header {SCORES_HEADER:?}, found {header:?}"),
        ));
    }
    let mut out = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| MsdeError::load(path, format!("row {r}: {e}")))?;
        let num = |c: usize| -> Result<f64> {
            rec[c]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    MsdeError::load(path, format!("row {r} column {c}: bad number {:?}", &rec[c]))
                })
        };
        let label = match &rec[1] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(MsdeError::load(
                    path,
                    format!("row {r} column 1: label {other:?} is not 0 or 1"),
                ))
            }
        };
        out.push(ScoreRow {
            row_id: rec[0].to_string(),
            label,
            raw: num(2)?,
            normalized: num(3)?,
        });
    }
    Ok(out)
}
