//! Temporal link-prediction evaluation.

use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::stream::NodeId;

mod logistic;
mod metrics;
mod protocol;
mod ranking;
mod sampling;

pub use logistic::{logistic_objective, train_logistic, LogisticModel, LogisticParams};
pub use metrics::{auc, classification_metrics, evaluate_scores, Scores};
pub use protocol::{align_protocol, align_protocol_with, ProtocolParams, ProtocolSplit};
pub use ranking::{mean_gain, rank_models, Criterion, GainRow, GainTable, RankRow, RankTable};
pub use sampling::{positive_pairs, sample_negatives, LabeledEdgeSet};

/// Scores of one (dataset, base method, temporal model) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub dataset: String,
    pub method: String,
    pub model: String,
    pub auc: f64,
    pub acc: f64,
    pub f1: f64,
}

impl MetricRecord {
    pub fn value(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Auc => self.auc,
            Criterion::Acc => self.acc,
            Criterion::F1 => self.f1,
        }
    }

    /// `method/model`, e.g. `structural/TSG-eps`.
    pub fn variant(&self) -> String {
        format!("{}/{}", self.method, self.model)
    }
}

/// `[z_i ; z_j]`.
pub fn edge_embedding(z: &EmbeddingMatrix, i: NodeId, j: NodeId) -> Result<Vec<f64>> {
    for n in [i, j] {
        if n.index() >= z.rows() {
            return Err(Error::UnknownNode(n.index()));
        }
    }
    let mut v = Vec::with_capacity(2 * z.dim());
    v.extend_from_slice(z.row(i.index()));
    v.extend_from_slice(z.row(j.index()));
    Ok(v)
}
