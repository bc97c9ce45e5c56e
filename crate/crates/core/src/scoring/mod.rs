//! PCA-reduced Gaussian density model, Mahalanobis scores, and the full
//! scoring pipeline.

mod gaussian;
mod pca;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use gaussian::{GaussianModel, GaussianParams};
pub use pca::{covariance, PcaBasis};

use crate::config::MsdeConfig;
use crate::data_io::{DatasetSplit, EmbeddingMatrix, Standardizer};
use crate::error::{MsdeError, Result};
use crate::eval::{evaluate, MetricResult};
use crate::par;
use crate::shift::{joint_shift, JointShift};

/// Below this population std all normalized scores collapse to 0.5.
pub const NORMALIZE_STD_FLOOR: f64 = 1e-12;

/// PCA basis plus the Gaussian fitted in the reduced space.
#[derive(Debug, Clone)]
pub struct GaussianScorer {
    pub basis: PcaBasis,
    pub model: GaussianModel,
}

impl GaussianScorer {
    pub fn fit(train: &EmbeddingMatrix, reduced_dim: usize, lambda: f64) -> Result<Self> {
        let basis = PcaBasis::fit(train, reduced_dim)?;
        let z = basis.project(train)?;
        let model = GaussianModel::fit(z.points(), lambda)?;
        Ok(GaussianScorer { basis, model })
    }

    /// Raw Mahalanobis score for every row of `x`.
    pub fn score(&self, x: &EmbeddingMatrix) -> Result<Vec<f64>> {
        let z = self.basis.project(x)?;
        let zp = z.points();
        par::map_indices(z.n_samples(), |i| self.model.mahalanobis(zp.row(i)))
            .into_iter()
            .collect()
    }
}

/// Z-score with the population mean and std of `raw` itself, then a logistic
/// map into [0, 1].
pub fn normalize_scores(raw: &[f64]) -> Vec<f64> {
    if raw.is_empty() {
        return Vec::new();
    }
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let var = raw.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < NORMALIZE_STD_FLOOR {
        return vec![0.5; raw.len()];
    }
    raw.iter()
        .map(|r| 1.0 / (1.0 + (-(r - mean) / std).exp()))
        .collect()
}

/// Per-test-row scores in test-matrix order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub row_ids: Vec<String>,
    pub labels: Vec<u8>,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    /// Present when the labels contain both classes.
    pub metrics: Option<MetricResult>,
}

/// Everything produced by one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: ScoreReport,
    pub standardizer: Option<Standardizer>,
    pub scorer: GaussianScorer,
    pub shift: JointShift,
}

impl PipelineRun {
    pub fn bundle(&self, config: &MsdeConfig) -> ModelBundle {
        ModelBundle {
            standardizer: self.standardizer.clone(),
            pca: self.scorer.basis.clone(),
            gaussian: self.scorer.model.params(),
            config: config.clone(),
        }
    }
}

/// Standardize, shift (train alone and jointly with test), fit PCA and the
/// Gaussian on shifted train, score the jointly shifted test rows, normalize.
pub fn run_pipeline(split: &DatasetSplit, config: &MsdeConfig) -> Result<PipelineRun> {
    config.validate()?;
    let (standardizer, split) = if config.standardize {
        let s = Standardizer::fit(&split.train)?;
        let train = s.apply(&split.train)?;
        let test = s.apply(&split.test)?;
        (Some(s), DatasetSplit::new(train, test)?)
    } else {
        (None, split.clone())
    };
    let shift = joint_shift(&split, &config.shift)?;
    let fit_on = if config.fit_on_joint {
        &shift.train_joint
    } else {
        &shift.train_solo.points
    };
    let scorer = GaussianScorer::fit(fit_on, config.pca_dim, config.lambda)?;
    let raw = scorer.score(&shift.test_joint)?;
    let normalized = normalize_scores(&raw);
    let labels = split
        .test
        .labels()
        .map(<[u8]>::to_vec)
        .unwrap_or_else(|| vec![0; raw.len()]);
    let has_both = labels.contains(&0) && labels.contains(&1);
    let metrics = if has_both {
        Some(evaluate(&raw, &labels)?)
    } else {
        log::warn!("test labels contain a single class; metrics are undefined");
        None
    };
    Ok(PipelineRun {
        report: ScoreReport {
            row_ids: split.test.row_ids().to_vec(),
            labels,
            raw,
            normalized,
            metrics,
        },
        standardizer,
        scorer,
        shift,
    })
}

/// Scores for `split.test` under `config`.
pub fn score_pipeline(split: &DatasetSplit, config: &MsdeConfig) -> Result<ScoreReport> {
    run_pipeline(split, config).map(|r| r.report)
}

/// Self-describing fitted model: reloading it reproduces scores bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub standardizer: Option<Standardizer>,
    pub pca: PcaBasis,
    pub gaussian: GaussianParams,
    pub config: MsdeConfig,
}

impl ModelBundle {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| MsdeError::numeric("scoring", e.to_string()))?;
        std::fs::write(path, text).map_err(|e| MsdeError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MsdeError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| MsdeError::load(path, e.to_string()))
    }

    pub fn scorer(&self) -> Result<GaussianScorer> {
        Ok(GaussianScorer {
            basis: self.pca.clone(),
            model: GaussianModel::from_params(self.gaussian.clone())?,
        })
    }
}
