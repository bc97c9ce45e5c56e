//! Density-weighted mean shift.
//!
//! Every iteration rebuilds the k-NN graph on the current points and moves
//! each point a fraction `eta` of the way toward the density-weighted mean of
//! its neighbors. Updates are synchronous: all targets are computed from the
//! snapshot taken at the start of the iteration.

use serde::{Deserialize, Serialize};

use crate::data_io::{DatasetSplit, EmbeddingMatrix, Points};
use crate::density::{compute_empirical_weights, DensityWeights};
use crate::error::{MsdeError, Result};
use crate::knn::{build_knn_graph, NeighborGraph};
use crate::par;

/// Shift hyperparameters. Defaults are the fixed universal setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftParams {
    pub k: usize,
    pub eta: f64,
    /// 0 disables shifting entirely (the no-shift baseline).
    pub max_iters: usize,
    pub tol: f64,
    pub t_nbd: usize,
    pub k_umap: usize,
    /// Reuse the first iteration's graph instead of rebuilding it.
    pub static_graph: bool,
}

impl Default for ShiftParams {
    fn default() -> Self {
        ShiftParams {
            k: 50,
            eta: 0.33,
            max_iters: 8,
            tol: 0.01,
            t_nbd: 70,
            k_umap: 15,
            static_graph: false,
        }
    }
}

impl ShiftParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(MsdeError::Config(format!("eta must be in (0, 1], got {}", self.eta)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(MsdeError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.k == 0 {
            return Err(MsdeError::Config("k must be at least 1".into()));
        }
        if self.t_nbd == 0 {
            return Err(MsdeError::Config("t_nbd must be at least 1".into()));
        }
        if self.k_umap < 2 {
            return Err(MsdeError::Config(format!(
                "k_umap must be at least 2, got {}",
                self.k_umap
            )));
        }
        Ok(())
    }
}

/// Per-iteration mean displacement and whether the threshold was reached.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftTrace {
    pub deltas: Vec<f64>,
    pub converged: bool,
}

impl ShiftTrace {
    pub fn iterations_run(&self) -> usize {
        self.deltas.len()
    }
}

#[derive(Debug, Clone)]
pub struct ShiftedEmbeddings {
    pub points: EmbeddingMatrix,
    pub trace: ShiftTrace,
    /// `None` when shifting was disabled.
    pub weights_used: Option<DensityWeights>,
}

/// One synchronous update. Returns the new row-major values and the mean
/// displacement `(1/n) Σ ‖x_new - x_old‖`.
pub fn shift_step(
    points: Points<'_>,
    graph: &NeighborGraph,
    weights: &[f64],
    eta: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = points.len();
    let dim = points.dim();
    if graph.n() != n || weights.len() != n {
        return Err(MsdeError::shape(
            "mean_shift",
            format!(
                "{n} points but graph over {} and {} weights",
                graph.n(),
                weights.len()
            ),
        ));
    }
    let mut out = vec![0.0; n * dim];
    par::fill_rows(&mut out, dim, |i, row| {
        let nbrs = graph.neighbors(i);
        let total: f64 = nbrs.iter().map(|&j| weights[j]).sum();
        // Neighbor order is fixed, so this sum is bitwise reproducible.
        let (scale, uniform) = if total > 0.0 { (total, false) } else { (nbrs.len() as f64, true) };
        let target = row;
        target.iter_mut().for_each(|v| *v = 0.0);
        for &j in nbrs {
            let w = if uniform { 1.0 } else { weights[j] };
            if w == 0.0 {
                continue;
            }
            for (t, x) in target.iter_mut().zip(points.row(j)) {
                *t += w * x;
            }
        }
        let x = points.row(i);
        for (t, xi) in target.iter_mut().zip(x) {
            let mean = *t / scale;
            *t = (1.0 - eta) * xi + eta * mean;
        }
    });
    if let Some(pos) = out.iter().position(|v| !v.is_finite()) {
        return Err(MsdeError::numeric(
            "mean_shift",
            format!("non-finite coordinate at row {} after shift step", pos / dim),
        ));
    }
    let disp: Vec<f64> = par::map_indices(n, |i| {
        sq_norm_diff(&out[i * dim..(i + 1) * dim], points.row(i)).sqrt()
    });
    let mean = disp.iter().sum::<f64>() / n as f64;
    Ok((out, mean))
}

fn sq_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    crate::data_io::sq_dist(a, b)
}

/// Shift loop on raw values, with weights computed once from the input.
pub fn run_shift_values(points: Points<'_>, params: &ShiftParams) -> Result<(Vec<f64>, ShiftTrace, Option<DensityWeights>)> {
    let mut current = points.as_slice().to_vec();
    if params.max_iters == 0 {
        return Ok((current, ShiftTrace::default(), None));
    }
    params.validate()?;
    let n = points.len();
    if n < 2 {
        return Err(MsdeError::shape(
            "mean_shift",
            format!("need at least 2 points to shift, got {n}"),
        ));
    }
    let dim = points.dim();
    let weights = compute_empirical_weights(points, params.t_nbd, params.k_umap)?;
    let mut trace = ShiftTrace::default();
    let mut graph: Option<NeighborGraph> = None;
    for t in 1..=params.max_iters {
        let snapshot = Points::new(&current, dim);
        if graph.is_none() || !params.static_graph {
            graph = Some(build_knn_graph(snapshot, params.k)?);
        }
        let g = graph.as_ref().expect("graph built above");
        let (next, delta) = shift_step(snapshot, g, &weights.weights, params.eta)?;
        current = next;
        trace.deltas.push(delta);
        log::debug!("shift iteration {t}: mean displacement {delta:.6e}");
        if delta < params.tol {
            trace.converged = true;
            break;
        }
    }
    Ok((current, trace, Some(weights)))
}

/// Shift an embedding matrix; ids, labels and shape are preserved.
pub fn run_shift(points: &EmbeddingMatrix, params: &ShiftParams) -> Result<ShiftedEmbeddings> {
    let (values, trace, weights_used) = run_shift_values(points.points(), params)?;
    Ok(ShiftedEmbeddings {
        points: points.with_values(values)?,
        trace,
        weights_used,
    })
}

/// Result of shifting train alone and train ∪ test together.
#[derive(Debug, Clone)]
pub struct JointShift {
    /// Train shifted on its own; this is what the density model is fitted on.
    pub train_solo: ShiftedEmbeddings,
    /// Train rows from the joint run (normally discarded).
    pub train_joint: EmbeddingMatrix,
    /// Test rows from the joint run.
    pub test_joint: EmbeddingMatrix,
    pub joint_trace: ShiftTrace,
    pub joint_weights: Option<DensityWeights>,
}

/// Shift train alone, then shift the concatenation train-then-test with
/// freshly computed weights, and split the result back apart.
pub fn joint_shift(split: &DatasetSplit, params: &ShiftParams) -> Result<JointShift> {
    let train_solo = run_shift(&split.train, params)?;
    let n = split.train.n_samples();
    let dim = split.train.dim();
    if split.test.n_samples() == 0 {
        return Ok(JointShift {
            train_joint: train_solo.points.clone(),
            test_joint: split.test.clone(),
            joint_trace: train_solo.trace.clone(),
            joint_weights: train_solo.weights_used.clone(),
            train_solo,
        });
    }
    let mut union = split.train.values().to_vec();
    union.extend_from_slice(split.test.values());
    let (values, joint_trace, joint_weights) = run_shift_values(Points::new(&union, dim), params)?;
    let (train_vals, test_vals) = values.split_at(n * dim);
    Ok(JointShift {
        train_joint: split.train.with_values(train_vals.to_vec())?,
        test_joint: split.test.with_values(test_vals.to_vec())?,
        train_solo,
        joint_trace,
        joint_weights,
    })
}
