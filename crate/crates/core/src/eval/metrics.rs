use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub auc: f64,
    pub acc: f64,
    pub f1: f64,
}

fn check(scores: &[f64], labels: &[bool]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if !(labels.contains(&true) && labels.contains(&false)) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs ordered correctly, ties counting one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Midranks are half-integers, so every sum below is exact.
    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[start]] {
            end += 1;
        }
        let midrank = (start + end) as f64 / 2.0 + 1.0;
        let positives = order[start..=end].iter().filter(|&&k| labels[k]).count();
        rank_sum_pos += midrank * positives as f64;
        start = end + 1;
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    let u = rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0;
    Ok(u / (n_pos * n_neg))
}

/// Accuracy and positive-class F1 at probability threshold 0.5.
pub fn classification_metrics(probabilities: &[f64], labels: &[bool]) -> Result<(f64, f64)> {
    check(probabilities, labels)?;
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &l) in probabilities.iter().zip(labels) {
        match (p >= 0.5, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let acc = (tp + tn) as f64 / labels.len() as f64;
    let f1 = if tp == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    };
    Ok((acc, f1))
}

pub fn evaluate_scores(probabilities: &[f64], labels: &[bool]) -> Result<Scores> {
    let auc = auc(probabilities, labels)?;
    let (acc, f1) = classification_metrics(probabilities, labels)?;
    Ok(Scores { auc, acc, f1 })
}
