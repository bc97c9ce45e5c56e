//! AUC-ROC and average precision with exact tie handling.

use serde::{Deserialize, Serialize};

use crate::error::{MsdeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub auc: f64,
    pub ap: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl MetricResult {
    /// `{"auc": …, "ap": …, "n_pos": …, "n_neg": …}` with six decimals.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"auc\": {:.6}, \"ap\": {:.6}, \"n_pos\": {}, \"n_neg\": {}}}",
            self.auc, self.ap, self.n_pos, self.n_neg
        )
    }
}

fn check(scores: &[f64], labels: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(MsdeError::shape(
            "eval",
            format!("{} scores but {} labels", scores.len(), labels.len()),
        ));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(MsdeError::Metric(format!("score {} at row {i} is not finite", scores[i])));
    }
    if let Some(i) = labels.iter().position(|&l| l > 1) {
        return Err(MsdeError::Metric(format!("label {} at row {i} is not 0 or 1", labels[i])));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    Ok((n_pos, labels.len() - n_pos))
}

/// Blocks of tied scores in descending score order, as (positives, negatives).
fn descending_blocks(scores: &[f64], labels: &[u8]) -> Vec<(u64, u64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (mut p, mut q) = (0u64, 0u64);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                p += 1;
            } else {
                q += 1;
            }
            i += 1;
        }
        blocks.push((p, q));
    }
    blocks
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half. O(n log n).
pub fn auc_roc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (n_pos, n_neg) = check(scores, labels)?;
    if n_pos == 0 || n_neg == 0 {
        return Err(MsdeError::Metric(format!(
            "AUC needs both classes (got {n_pos} positives, {n_neg} negatives)"
        )));
    }
    // Walk from the lowest score up, counting wins in half units.
    let mut neg_below = 0u64;
    let mut half_wins = 0u64;
    for (p, q) in descending_blocks(scores, labels).into_iter().rev() {
        half_wins += 2 * p * neg_below + p * q;
        neg_below += q;
    }
    Ok(half_wins as f64 / (2 * n_pos as u64 * n_neg as u64) as f64)
}

/// Step-integrated precision over recall, evaluating each block of tied
/// scores once at its end.
pub fn average_precision(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (n_pos, _) = check(scores, labels)?;
    if n_pos == 0 {
        return Err(MsdeError::Metric("average precision needs at least one positive".into()));
    }
    let (mut tp, mut seen) = (0u64, 0u64);
    // Sum p * precision and divide once, so a perfect ranking gives exactly 1.
    let mut acc = 0.0;
    for (p, q) in descending_blocks(scores, labels) {
        tp += p;
        seen += p + q;
        if p > 0 {
            acc += p as f64 * (tp as f64 / seen as f64);
        }
    }
    Ok(acc / n_pos as f64)
}

pub fn evaluate(scores: &[f64], labels: &[u8]) -> Result<MetricResult> {
    let (n_pos, n_neg) = check(scores, labels)?;
    Ok(MetricResult {
        auc: auc_roc(scores, labels)?,
        ap: average_precision(scores, labels)?,
        n_pos,
        n_neg,
    })
}
