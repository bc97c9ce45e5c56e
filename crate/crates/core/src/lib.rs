//! Density-weighted mean-shift refinement of feature embeddings followed by
//! PCA-reduced Gaussian density estimation and Mahalanobis scoring, for
//! one-class anomaly detection.
//!
//! The pipeline, end to end:
//!
//! 1. standardize embeddings with training statistics ([`data_io::Standardizer`]),
//! 2. compute per-sample empirical density weights from a fuzzy k-NN graph
//!    ([`density`]),
//! 3. iteratively pull every sample toward the density-weighted mean of its
//!    k nearest neighbors ([`shift`]), once on the training set alone and once
//!    on the union of train and test,
//! 4. fit PCA and a regularized Gaussian on the shifted training set and score
//!    the jointly shifted test samples by Mahalanobis distance ([`scoring`]),
//! 5. evaluate with AUC-ROC and average precision ([`eval`]).
//!
//! Data-parallel inner loops run on rayon when the `parallel` feature is on
//! (default); every result is independent of the worker count.

pub mod cli;
pub mod config;
pub mod data_io;
pub mod density;
pub mod error;
pub mod eval;
pub mod knn;
pub mod par;
pub mod scoring;
pub mod shift;
pub mod tune;

pub use config::MsdeConfig;
pub use data_io::{DatasetSplit, EmbeddingMatrix, Points};
pub use error::{MsdeError, Result};
pub use eval::MetricResult;
pub use scoring::{score_pipeline, ScoreReport};
pub use shift::ShiftParams;
