//! Random hyperparameter search under a zero-leakage validation protocol.
//!
//! Validation uses 20% of the training normals and 10% of the test anomalies;
//! those anomalies are removed from the final test set for good. Each trial
//! fits on the remaining 80% of training normals and is judged by validation
//! AUC. The winner is refitted on all training normals and evaluated once on
//! the untouched final test set.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::MsdeConfig;
use crate::data_io::{DatasetSplit, EmbeddingMatrix};
use crate::error::{MsdeError, Result};
use crate::eval::MetricResult;
use crate::par;
use crate::scoring::score_pipeline;
use crate::shift::ShiftParams;

pub const DEFAULT_TRIALS: usize = 80;
pub const MIN_TRAIN_NORMALS: usize = 5;
pub const MIN_TEST_ANOMALIES: usize = 10;

/// Inclusive search ranges; `tol` is sampled log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub k: (usize, usize),
    pub t_nbd: (usize, usize),
    pub eta: (f64, f64),
    pub max_iters: (usize, usize),
    pub tol: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            k: (5, 60),
            t_nbd: (3, 80),
            eta: (0.01, 0.5),
            max_iters: (3, 12),
            tol: (1e-4, 0.05),
        }
    }
}

impl SearchSpace {
    /// Draw one parameter set; `base` supplies the fields that are not searched.
    pub fn sample<R: Rng>(&self, rng: &mut R, base: &ShiftParams) -> ShiftParams {
        let eta = rng.random_range(self.eta.0..=self.eta.1);
        let (lt0, lt1) = (self.tol.0.ln(), self.tol.1.ln());
        let tol = rng
            .random_range(lt0..=lt1)
            .exp()
            .clamp(self.tol.0, self.tol.1);
        ShiftParams {
            k: rng.random_range(self.k.0..=self.k.1),
            t_nbd: rng.random_range(self.t_nbd.0..=self.t_nbd.1),
            eta,
            max_iters: rng.random_range(self.max_iters.0..=self.max_iters.1),
            tol,
            ..*base
        }
    }

    pub fn contains(&self, p: &ShiftParams) -> bool {
        (self.k.0..=self.k.1).contains(&p.k)
            && (self.t_nbd.0..=self.t_nbd.1).contains(&p.t_nbd)
            && (self.eta.0..=self.eta.1).contains(&p.eta)
            && (self.max_iters.0..=self.max_iters.1).contains(&p.max_iters)
            && (self.tol.0..=self.tol.1).contains(&p.tol)
    }
}

/// Partition of a dataset for leakage-free tuning.
#[derive(Debug, Clone)]
pub struct LeakageSplit {
    /// All training normals, for the final refit.
    pub full_train: EmbeddingMatrix,
    pub fit_train: EmbeddingMatrix,
    pub val_normals: EmbeddingMatrix,
    pub val_anomalies: EmbeddingMatrix,
    /// Test normals plus the anomalies not used for validation.
    pub final_test: EmbeddingMatrix,
}

impl LeakageSplit {
    /// Fit on 80% of normals, evaluate on the validation normals and
    /// anomalies. Validation ids are prefixed `train:` / `test:` by origin.
    pub fn validation_split(&self) -> Result<DatasetSplit> {
        let normals = self
            .val_normals
            .clone()
            .with_labels(Some(vec![0; self.val_normals.n_samples()]))?
            .prefix_ids("train:");
        let anomalies = self.val_anomalies.clone().prefix_ids("test:");
        DatasetSplit::new(self.fit_train.clone(), normals.vstack(&anomalies)?)
    }

    pub fn final_split(&self) -> Result<DatasetSplit> {
        DatasetSplit::new(self.full_train.clone(), self.final_test.clone())
    }
}

/// Deterministic shuffled 80/20 split of training normals and 90/10 split of
/// test anomalies (floor on the smaller side).
pub fn make_leakage_split(split: &DatasetSplit, seed: u64) -> Result<LeakageSplit> {
    let n_train = split.train.n_samples();
    let labels = split
        .test
        .labels()
        .ok_or_else(|| MsdeError::Split("test set has no labels".into()))?;
    let mut anomalies: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    if n_train < MIN_TRAIN_NORMALS || anomalies.len() < MIN_TEST_ANOMALIES {
        return Err(MsdeError::Split(format!(
            "need at least {MIN_TRAIN_NORMALS} training normals and {MIN_TEST_ANOMALIES} test anomalies, got {n_train} and {}",
            anomalies.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normals: Vec<usize> = (0..n_train).collect();
    normals.shuffle(&mut rng);
    anomalies.shuffle(&mut rng);

    let n_val = n_train / 5;
    let mut val_n = normals[..n_val].to_vec();
    let mut fit = normals[n_val..].to_vec();
    val_n.sort_unstable();
    fit.sort_unstable();

    let a_val = anomalies.len() / 10;
    let mut val_a = anomalies[..a_val].to_vec();
    val_a.sort_unstable();
    let removed: HashSet<usize> = val_a.iter().copied().collect();
    let keep: Vec<usize> = (0..labels.len()).filter(|i| !removed.contains(i)).collect();

    Ok(LeakageSplit {
        full_train: split.train.clone(),
        fit_train: split.train.select(&fit)?,
        val_normals: split.train.select(&val_n)?,
        val_anomalies: split.test.select(&val_a)?,
        final_test: split.test.select(&keep)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub seed: u64,
    pub params: ShiftParams,
    /// -1 when the trial failed.
    pub val_auc: f64,
    pub val_ap: f64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: TrialRecord,
    pub trials: Vec<TrialRecord>,
    pub final_metrics: MetricResult,
    pub leakage: LeakageSplit,
}

/// Sample `n_trials` parameter sets (trial `i` seeded with `seed + i`) and
/// search over them.
pub fn random_search(
    split: &DatasetSplit,
    space: &SearchSpace,
    n_trials: usize,
    seed: u64,
    base: &MsdeConfig,
) -> Result<SearchOutcome> {
    random_search_observed(split, space, n_trials, seed, base, &|_| {})
}

/// [`random_search`] with a hook that sees every split handed to the
/// pipeline during the trial loop.
pub fn random_search_observed(
    split: &DatasetSplit,
    space: &SearchSpace,
    n_trials: usize,
    seed: u64,
    base: &MsdeConfig,
    observer: &(dyn Fn(&DatasetSplit) + Sync),
) -> Result<SearchOutcome> {
    if n_trials == 0 {
        return Err(MsdeError::Config("at least one trial is required".into()));
    }
    let candidates: Vec<(u64, ShiftParams)> = (0..n_trials)
        .map(|i| {
            let trial_seed = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            (trial_seed, space.sample(&mut rng, &base.shift))
        })
        .collect();
    search_candidates(split, &candidates, seed, base, observer)
}

/// Evaluate explicit `(seed, params)` candidates in order.
pub fn search_candidates(
    split: &DatasetSplit,
    candidates: &[(u64, ShiftParams)],
    seed: u64,
    base: &MsdeConfig,
    observer: &(dyn Fn(&DatasetSplit) + Sync),
) -> Result<SearchOutcome> {
    if candidates.is_empty() {
        return Err(MsdeError::Config("at least one trial is required".into()));
    }
    let leakage = make_leakage_split(split, seed)?;
    let validation = leakage.validation_split()?;

    let trials: Vec<TrialRecord> = par::map_indices(candidates.len(), |i| {
        let (trial_seed, params) = candidates[i];
        let config = MsdeConfig {
            shift: params,
            seed: trial_seed,
            ..base.clone()
        };
        observer(&validation);
        let (val_auc, val_ap) = match score_pipeline(&validation, &config) {
            Ok(r) => match r.metrics {
                Some(m) => (m.auc, m.ap),
                None => (-1.0, -1.0),
            },
            Err(e) => {
                log::warn!("trial {i} failed: {e}");
                (-1.0, -1.0)
            }
        };
        log::info!("trial {i}: val auc {val_auc:.6}");
        TrialRecord {
            trial_index: i,
            seed: trial_seed,
            params,
            val_auc,
            val_ap,
        }
    });

    let best = trials
        .iter()
        .filter(|t| t.val_auc >= 0.0)
        .fold(None::<&TrialRecord>, |best, t| match best {
            Some(b) if b.val_auc >= t.val_auc => Some(b),
            _ => Some(t),
        })
        .cloned()
        .ok_or_else(|| MsdeError::numeric("tune", "every trial failed"))?;

    let final_config = MsdeConfig {
        shift: best.params,
        seed: best.seed,
        ..base.clone()
    };
    let final_metrics = score_pipeline(&leakage.final_split()?, &final_config)?
        .metrics
        .ok_or_else(|| MsdeError::Metric("final test set lacks one of the classes".into()))?;
    Ok(SearchOutcome {
        best,
        trials,
        final_metrics,
        leakage,
    })
}
