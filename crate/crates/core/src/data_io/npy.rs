//! Minimal NPY v1.0 codec: 2-D, C order, little-endian `<f4` or `<f8`.
//! Anything else is rejected.

use std::fs;
use std::path::Path;

use super::EmbeddingMatrix;
use crate::error::{MsdeError, Result};

const MAGIC: &[u8] = b"\x93NUMPY";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Descr {
    F4,
    F8,
}

#[derive(Debug)]
struct Header {
    descr: Descr,
    rows: usize,
    cols: usize,
}

pub fn read_npy(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(|e| MsdeError::io(path, e))?;
    let (values, cols) = decode(&bytes).map_err(|d| MsdeError::load(path, d))?;
    EmbeddingMatrix::from_rows(values, cols).map_err(|e| MsdeError::load(path, e.to_string()))
}

pub fn write_npy(path: &Path, rows: usize, cols: usize, values: &[f64]) -> Result<()> {
    fs::write(path, encode(rows, cols, values)).map_err(|e| MsdeError::io(path, e))
}

/// Serialize as `<f8`. The header is padded so the payload starts on a
/// 64-byte boundary, as numpy does.
pub fn encode(rows: usize, cols: usize, values: &[f64]) -> Vec<u8> {
    assert_eq!(values.len(), rows * cols);
    let mut dict = format!("{{'descr': '<f8', 'fortran_order': False, 'shape': ({rows}, {cols}), }}");
    let unpadded = MAGIC.len() + 2 + 2 + dict.len() + 1;
    let pad = (64 - unpadded % 64) % 64;
    dict.extend(std::iter::repeat_n(' ', pad));
    dict.push('\n');

    let mut out = Vec::with_capacity(MAGIC.len() + 4 + dict.len() + values.len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decode to row-major f64 values plus the column count.
pub fn decode(bytes: &[u8]) -> std::result::Result<(Vec<f64>, usize), String> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err("not an NPY file (bad magic)".into());
    }
    if bytes[6] != 1 || bytes[7] != 0 {
        return Err(format!(
            "unsupported NPY version {}.{} (only 1.0)",
            bytes[6], bytes[7]
        ));
    }
    let hlen = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let start = 10 + hlen;
    if bytes.len() < start {
        return Err("truncated NPY header".into());
    }
    let text = std::str::from_utf8(&bytes[10..start]).map_err(|_| "NPY header is not ASCII")?;
    let header = parse_header(text)?;
    if header.cols == 0 {
        return Err("dimension 0 (shape has zero columns)".into());
    }
    if header.rows == 0 {
        return Err("matrix has zero rows".into());
    }
    let count = header
        .rows
        .checked_mul(header.cols)
        .ok_or("shape overflows")?;
    let width = match header.descr {
        Descr::F4 => 4,
        Descr::F8 => 8,
    };
    let payload = &bytes[start..];
    if payload.len() != count * width {
        return Err(format!(
            "payload has {} bytes, shape ({}, {}) needs {}",
            payload.len(),
            header.rows,
            header.cols,
            count * width
        ));
    }
    let values: Vec<f64> = match header.descr {
        Descr::F8 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
        Descr::F4 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    };
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(format!(
            "non-finite value {} at row {} column {}",
            values[pos],
            pos / header.cols,
            pos % header.cols
        ));
    }
    Ok((values, header.cols))
}

fn dict_value<'a>(text: &'a str, key: &str) -> std::result::Result<&'a str, String> {
    let pat = format!("'{key}'");
    let at = text
        .find(&pat)
        .ok_or_else(|| format!("NPY header lacks {pat}"))?;
    let rest = text[at + pat.len()..].trim_start();
    let rest = rest
        .strip_prefix(':')
        .ok_or_else(|| format!("malformed NPY header near {pat}"))?;
    Ok(rest.trim_start())
}

fn parse_header(text: &str) -> std::result::Result<Header, String> {
    let descr_v = dict_value(text, "descr")?;
    let descr = if descr_v.starts_with("'<f8'") {
        Descr::F8
    } else if descr_v.starts_with("'<f4'") {
        Descr::F4
    } else {
        let shown: String = descr_v.chars().take_while(|c| *c != ',').collect();
        return Err(format!(
            "unsupported dtype {shown} (only '<f4' and '<f8')"
        ));
    };

    let fo = dict_value(text, "fortran_order")?;
    if fo.starts_with("True") {
        return Err("Fortran-order arrays are not supported".into());
    } else if !fo.starts_with("False") {
        return Err("malformed fortran_order".into());
    }

    let shape_v = dict_value(text, "shape")?;
    let inner = shape_v
        .strip_prefix('(')
        .and_then(|s| s.split_once(')'))
        .map(|(s, _)| s)
        .ok_or("malformed shape tuple")?;
    let dims = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| format!("bad shape entry {s:?}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if dims.len() != 2 {
        return Err(format!("expected a 2-D array, got shape {dims:?}"));
    }
    Ok(Header {
        descr,
        rows: dims[0],
        cols: dims[1],
    })
}
