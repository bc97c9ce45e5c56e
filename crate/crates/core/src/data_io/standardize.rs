use serde::{Deserialize, Serialize};

use super::EmbeddingMatrix;
use crate::error::{MsdeError, Result};

/// Standard deviations below this are replaced by 1.0.
pub const STD_FLOOR: f64 = 1e-8;

/// Per-column z-scoring fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Column means and sample standard deviations (divisor n-1).
    pub fn fit(train: &EmbeddingMatrix) -> Result<Self> {
        let n = train.n_samples();
        if n < 2 {
            return Err(MsdeError::Fit {
                what: "standardizer",
                detail: format!("need at least 2 training rows, got {n}"),
            });
        }
        let d = train.dim();
        let mut mean = vec![0.0; d];
        for row in train.points().rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; d];
        for row in train.points().rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                let c = v - m;
                *s += c * c;
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / (n - 1) as f64).sqrt();
                if sd < STD_FLOOR {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
        if x.dim() != self.dim() {
            return Err(MsdeError::shape(
                "data_io",
                format!("standardizer fitted on dim {}, input has dim {}", self.dim(), x.dim()),
            ));
        }
        let values = x
            .points()
            .rows()
            .flat_map(|row| {
                row.iter()
                    .zip(&self.mean)
                    .zip(&self.std)
                    .map(|((v, m), s)| (v - m) / s)
            })
            .collect();
        x.with_values(values)
    }
}
