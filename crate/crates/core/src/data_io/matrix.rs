use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{MsdeError, Result};

/// Borrowed row-major view of `n × dim` reals. The numeric kernels work on
/// this so they can run on concatenations without carrying ids around.
#[derive(Debug, Clone, Copy)]
pub struct Points<'a> {
    data: &'a [f64],
    n: usize,
    dim: usize,
}

impl<'a> Points<'a> {
    /// Panics if `data.len() != n * dim`.
    pub fn new(data: &'a [f64], dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        assert_eq!(data.len() % dim, 0, "data length is not a multiple of dim");
        Points {
            data,
            n: data.len() / dim,
            dim,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &'a [f64] {
        self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &'a [f64]> + 'a {
        self.data.chunks_exact(self.dim)
    }
}

/// Squared Euclidean distance, summed in coordinate order. Every neighbor
/// search in the crate uses this one function so that tree search and
/// exhaustive scans agree bit for bit.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// `n` samples of dimension `dim`, with unique string row ids and optional
/// binary labels (0 normal, 1 anomalous).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    dim: usize,
    values: Vec<f64>,
    row_ids: Vec<String>,
    labels: Option<Vec<u8>>,
}

impl EmbeddingMatrix {
    /// Build a matrix with ids `"0" .. "n-1"` and no labels.
    pub fn from_rows(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(MsdeError::InvalidMatrix("dimension must be at least 1".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(MsdeError::InvalidMatrix(format!(
                "{} values do not fill rows of width {dim}",
                values.len()
            )));
        }
        let n = values.len() / dim;
        let ids = (0..n).map(|i| i.to_string()).collect();
        Self::new(values, dim, ids, None)
    }

    /// Build from nested rows; convenient in tests.
    pub fn from_nested(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(MsdeError::InvalidMatrix(format!(
                "row {i} has {} columns, expected {dim}",
                r.len()
            )));
        }
        Self::from_rows(rows.iter().flatten().copied().collect(), dim)
    }

    /// Validating constructor. Zero rows are allowed here so that an empty
    /// test set can flow through; loaders reject them.
    pub fn new(
        values: Vec<f64>,
        dim: usize,
        row_ids: Vec<String>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(MsdeError::InvalidMatrix("dimension must be at least 1".into()));
        }
        if values.len() != row_ids.len() * dim {
            return Err(MsdeError::InvalidMatrix(format!(
                "{} values for {} rows of width {dim}",
                values.len(),
                row_ids.len()
            )));
        }
        let n = row_ids.len();
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(MsdeError::InvalidMatrix(format!(
                "non-finite value {} at row {} column {}",
                values[pos],
                pos / dim,
                pos % dim
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &row_ids {
            if !seen.insert(id.as_str()) {
                return Err(MsdeError::InvalidMatrix(format!("duplicate row id {id:?}")));
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(MsdeError::InvalidMatrix(format!(
                    "{} labels for {n} rows",
                    l.len()
                )));
            }
            if let Some(i) = l.iter().position(|&v| v > 1) {
                return Err(MsdeError::InvalidMatrix(format!(
                    "label {} at row {i} is not 0 or 1",
                    l[i]
                )));
            }
        }
        Ok(EmbeddingMatrix {
            n,
            dim,
            values,
            row_ids,
            labels,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> Points<'_> {
        Points::new(&self.values, self.dim)
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn with_labels(self, labels: Option<Vec<u8>>) -> Result<Self> {
        Self::new(self.values, self.dim, self.row_ids, labels)
    }

    /// Same ids and labels, new values of identical shape.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(values, self.dim, self.row_ids.clone(), self.labels.clone())
    }

    /// Same ids and labels, values of a different width (e.g. after PCA).
    pub fn with_values_dim(&self, values: Vec<f64>, dim: usize) -> Result<Self> {
        Self::new(values, dim, self.row_ids.clone(), self.labels.clone())
    }

    pub(crate) fn with_labels_by_id(self, labels: &[(String, u8)], source: &Path) -> Result<Self> {
        let mut by_id: HashMap<&str, u8> = HashMap::with_capacity(labels.len());
        for (id, l) in labels {
            if by_id.insert(id.as_str(), *l).is_some() {
                return Err(MsdeError::load(source, format!("duplicate row id {id:?}")));
            }
        }
        let mut out = Vec::with_capacity(self.n);
        for id in &self.row_ids {
            match by_id.remove(id.as_str()) {
                Some(l) => out.push(l),
                None => {
                    return Err(MsdeError::load(source, format!("no label for row id {id:?}")))
                }
            }
        }
        if let Some(extra) = by_id.keys().next() {
            return Err(MsdeError::load(
                source,
                format!("label for unknown row id {extra:?}"),
            ));
        }
        self.with_labels(Some(out))
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            ids.push(self.row_ids[i].clone());
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Self::new(values, self.dim, ids, labels)
    }

    /// Prefix every row id, e.g. to keep ids unique when merging sources.
    pub fn prefix_ids(mut self, prefix: &str) -> Self {
        for id in &mut self.row_ids {
            id.insert_str(0, prefix);
        }
        self
    }

    /// Stack `self` over `other`. Ids must stay unique; labels survive only
    /// when both sides carry them.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(MsdeError::shape(
                "data_io",
                format!("cannot stack dims {} and {}", self.dim, other.dim),
            ));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        let mut ids = self.row_ids.clone();
        ids.extend(other.row_ids.iter().cloned());
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Self::new(values, self.dim, ids, labels)
    }
}

/// One-class train/test pair.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: EmbeddingMatrix,
    pub test: EmbeddingMatrix,
}

impl DatasetSplit {
    /// Checks: train is non-empty and all-normal, test is labelled, dims agree.
    pub fn new(train: EmbeddingMatrix, test: EmbeddingMatrix) -> Result<Self> {
        if train.dim() != test.dim() {
            return Err(MsdeError::shape(
                "data_io",
                format!(
                    "train has dim {} but test has dim {}",
                    train.dim(),
                    test.dim()
                ),
            ));
        }
        if train.n_samples() == 0 {
            return Err(MsdeError::InvalidMatrix("training set is empty".into()));
        }
        if let Some(l) = train.labels() {
            if let Some(i) = l.iter().position(|&v| v != 0) {
                return Err(MsdeError::InvalidMatrix(format!(
                    "training row {:?} is labelled anomalous; training must be normal-only",
                    train.row_ids()[i]
                )));
            }
        }
        if test.labels().is_none() {
            return Err(MsdeError::InvalidMatrix("test set has no labels".into()));
        }
        Ok(DatasetSplit { train, test })
    }
}
