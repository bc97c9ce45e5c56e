use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::data_io::{EmbeddingMatrix, Points};
use crate::error::{MsdeError, Result};
use crate::par;

/// Principal axes of a training set, largest variance first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaBasis {
    pub input_dim: usize,
    pub reduced_dim: usize,
    pub center: Vec<f64>,
    /// `reduced_dim × input_dim`, row-major, orthonormal rows.
    pub components: Vec<f64>,
    pub explained_variance: Vec<f64>,
}

/// Sample covariance (divisor n-1) of row-major points, plus column means.
pub fn covariance(points: Points<'_>) -> (Vec<f64>, Vec<f64>) {
    let n = points.len();
    let d = points.dim();
    let mut mean = vec![0.0; d];
    for row in points.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    // Centered columns, each contiguous.
    let mut cols = vec![0.0; d * n];
    for (i, row) in points.rows().enumerate() {
        for j in 0..d {
            cols[j * n + i] = row[j] - mean[j];
        }
    }
    let denom = (n - 1) as f64;
    let mut cov = vec![0.0; d * d];
    par::fill_rows(&mut cov, d, |a, out| {
        for (b, slot) in out.iter_mut().enumerate() {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            // Always reduce in (lower, higher) column order so the matrix is
            // exactly symmetric.
            let (x, y) = (&cols[lo * n..(lo + 1) * n], &cols[hi * n..(hi + 1) * n]);
            *slot = x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>() / denom;
        }
    });
    (mean, cov)
}

impl PcaBasis {
    /// Fit on `train`, keeping `reduced_dim` components (clamped to
    /// `min(input_dim, n - 1)` with a warning).
    pub fn fit(train: &EmbeddingMatrix, reduced_dim: usize) -> Result<Self> {
        let n = train.n_samples();
        if n < 2 {
            return Err(MsdeError::Fit {
                what: "PCA",
                detail: format!("need at least 2 training rows, got {n}"),
            });
        }
        if reduced_dim == 0 {
            return Err(MsdeError::Fit {
                what: "PCA",
                detail: "reduced dimension must be at least 1".into(),
            });
        }
        let d = train.dim();
        let cap = d.min(n - 1);
        let keep = if reduced_dim > cap {
            log::warn!("PCA dimension {reduced_dim} exceeds min(dim, n - 1) = {cap}; clamping");
            cap
        } else {
            reduced_dim
        };

        let (center, cov) = covariance(train.points());
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(d, d, &cov));
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .total_cmp(&eig.eigenvalues[a])
                .then(a.cmp(&b))
        });

        let mut components = Vec::with_capacity(keep * d);
        let mut explained_variance = Vec::with_capacity(keep);
        for &c in order.iter().take(keep) {
            let v = eig.eigenvectors.column(c);
            // Sign convention: the largest-magnitude entry is positive.
            let pivot = (0..d).fold(0, |best, j| if v[j].abs() > v[best].abs() { j } else { best });
            let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
            components.extend(v.iter().map(|x| sign * x));
            explained_variance.push(eig.eigenvalues[c].max(0.0));
        }
        Ok(PcaBasis {
            input_dim: d,
            reduced_dim: keep,
            center,
            components,
            explained_variance,
        })
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c * self.input_dim..(c + 1) * self.input_dim]
    }

    /// `z = components · (x - center)` for every row.
    pub fn project(&self, x: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
        let values = self.project_points(x.points())?;
        x.with_values_dim(values, self.reduced_dim)
    }

    pub fn project_points(&self, x: Points<'_>) -> Result<Vec<f64>> {
        if x.dim() != self.input_dim {
            return Err(MsdeError::shape(
                "scoring",
                format!("PCA fitted on dim {}, input has dim {}", self.input_dim, x.dim()),
            ));
        }
        let mut out = vec![0.0; x.len() * self.reduced_dim];
        par::fill_rows(&mut out, self.reduced_dim, |i, z| {
            let row = x.row(i);
            for (c, slot) in z.iter_mut().enumerate() {
                *slot = self
                    .component(c)
                    .iter()
                    .zip(row.iter().zip(&self.center))
                    .map(|(w, (v, m))| w * (v - m))
                    .sum();
            }
        });
        Ok(out)
    }
}
