use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{DatasetSplit, EmbeddingMatrix};
use crate::error::{MsdeError, Result};

/// Isotropic Gaussian blobs: normals at the origin, anomalies shifted by
/// `anomaly_offset` along the first axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub dim: usize,
    pub n_train: usize,
    pub n_test_normal: usize,
    pub n_test_anomalous: usize,
    pub anomaly_offset: f64,
    pub noise_scale: f64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        BlobSpec {
            dim: 32,
            n_train: 500,
            n_test_normal: 100,
            n_test_anomalous: 100,
            anomaly_offset: 2.5,
            noise_scale: 1.0,
        }
    }
}

impl BlobSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("dim", self.dim),
            ("n_train", self.n_train),
            ("n_test_normal", self.n_test_normal),
            ("n_test_anomalous", self.n_test_anomalous),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, c)| *c == 0) {
            return Err(MsdeError::Config(format!("{name} must be at least 1")));
        }
        if !(self.noise_scale > 0.0 && self.noise_scale.is_finite()) {
            return Err(MsdeError::Config(format!(
                "noise_scale must be positive, got {}",
                self.noise_scale
            )));
        }
        if !self.anomaly_offset.is_finite() {
            return Err(MsdeError::Config("anomaly_offset must be finite".into()));
        }
        Ok(())
    }
}

/// Draw a train/test split. Output is a pure function of `(spec, seed)`.
///
/// Train ids are `train-<i>`; test rows are normals first (`test-<i>`, label
/// 0) then anomalies (label 1).
pub fn generate_synthetic(spec: &BlobSpec, seed: u64) -> Result<DatasetSplit> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dim;
    let mut draw = |count: usize, offset: f64| -> Vec<f64> {
        let mut v = Vec::with_capacity(count * d);
        for _ in 0..count {
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                v.push(z * spec.noise_scale + if j == 0 { offset } else { 0.0 });
            }
        }
        v
    };
    let train_vals = draw(spec.n_train, 0.0);
    let mut test_vals = draw(spec.n_test_normal, 0.0);
    test_vals.extend(draw(spec.n_test_anomalous, spec.anomaly_offset));

    let train_ids = (0..spec.n_train).map(|i| format!("train-{i}")).collect();
    let n_test = spec.n_test_normal + spec.n_test_anomalous;
    let test_ids = (0..n_test).map(|i| format!("test-{i}")).collect();
    let labels = (0..n_test)
        .map(|i| u8::from(i >= spec.n_test_normal))
        .collect();

    let train = EmbeddingMatrix::new(train_vals, d, train_ids, None)?;
    let test = EmbeddingMatrix::new(test_vals, d, test_ids, Some(labels))?;
    DatasetSplit::new(train, test)
}
