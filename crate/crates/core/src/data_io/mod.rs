//! Embedding datasets: the in-memory matrix type, file formats (NPY and CSV),
//! training-set standardization, synthetic blobs, and score output.

mod matrix;
pub mod npy;
pub mod scores;
mod standardize;
mod synth;
pub mod text;

use std::path::Path;

pub use matrix::{sq_dist, DatasetSplit, EmbeddingMatrix, Points};
pub use scores::{load_scores, save_scores, ScoreRow};
pub use standardize::{Standardizer, STD_FLOOR};
pub use synth::{generate_synthetic, BlobSpec};

use crate::error::{MsdeError, Result};

/// On-disk embedding formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Npy,
    Csv,
}

impl Format {
    /// Guess the format from the file extension (`.npy` or anything else as CSV).
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("npy") => Format::Npy,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = MsdeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "npy" => Ok(Format::Npy),
            "csv" => Ok(Format::Csv),
            other => Err(MsdeError::Config(format!("unknown format {other:?} (expected npy or csv)"))),
        }
    }
}

/// Load an embedding matrix. All values are widened to `f64` and checked for
/// finiteness.
pub fn load_embeddings(path: impl AsRef<Path>, format: Format) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    match format {
        Format::Npy => npy::read_npy(path),
        Format::Csv => text::read_csv(path),
    }
}

/// Write an embedding matrix; NPY drops ids and labels.
pub fn save_embeddings(m: &EmbeddingMatrix, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    match format {
        Format::Npy => npy::write_npy(path, m.n_samples(), m.dim(), m.values()),
        Format::Csv => text::write_csv(m, path),
    }
}

/// Attach labels from a `row_id,label` sidecar CSV. Every matrix row must be
/// covered exactly once.
pub fn attach_labels(m: EmbeddingMatrix, labels_path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let labels = text::read_label_sidecar(labels_path.as_ref())?;
    m.with_labels_by_id(&labels, labels_path.as_ref())
}
