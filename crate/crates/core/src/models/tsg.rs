use serde::{Deserialize, Serialize};

use super::{snapshot_graph, WeightedGraph};
use crate::error::{Error, Result};
use crate::series::GraphTimeSeries;

/// Decay settings for temporal summary graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsgParams {
    /// Decay factor in `(0, 1)`; a snapshot `k` steps in the past is scaled by
    /// `(1 - alpha)^k`.
    pub alpha: f64,
    /// Window lag for [`tsg_series`].
    pub lag: Option<usize>,
}

impl TsgParams {
    pub fn new(alpha: f64) -> Result<Self> {
        let p = Self { alpha, lag: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lag(mut self, lag: usize) -> Self {
        self.lag = Some(lag);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha > 0.0 && self.alpha < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )))
        }
    }
}

/// `sum_p (1 - alpha)^(L-1-p) * A_p` over a window of `L` graphs.
fn decayed_sum(window: &[WeightedGraph], alpha: f64, template: &WeightedGraph) -> WeightedGraph {
    let mut out = WeightedGraph::new(template.num_nodes, template.directed);
    let last = window.len() - 1;
    for (p, a) in window.iter().enumerate() {
        let factor = (1.0 - alpha).powi((last - p) as i32);
        for (i, j, w) in a.arcs() {
            let acc = out.weight(i, j) + factor * w;
            out.set_arc(i, j, acc);
        }
    }
    out
}

/// Temporal summary graph `S = sum_t (1 - alpha)^(T - t) A_t`, where `A_t`
/// is the snapshot graph of the `t`-th snapshot.
pub fn build_tsg(series: &GraphTimeSeries, params: &TsgParams) -> Result<WeightedGraph> {
    params.validate()?;
    if series.is_empty() {
        return Err(Error::Empty(
            "temporal summary graph of an empty series".into(),
        ));
    }
    let graphs = snapshot_graphs(series);
    Ok(decayed_sum(&graphs, params.alpha, &graphs[0]))
}

/// Lagged summary graphs `S_t = sum_{k=t-lag}^{t} (1 - alpha)^(t-k) A_k` for
/// `t = lag+1 ..= T`.
pub fn tsg_series(series: &GraphTimeSeries, params: &TsgParams) -> Result<Vec<WeightedGraph>> {
    params.validate()?;
    let lag = params
        .lag
        .ok_or_else(|| Error::InvalidParameter("tsg_series needs a lag".into()))?;
    if series.len() <= lag {
        return Err(Error::InvalidParameter(format!(
            "lag {lag} needs more than {lag} snapshots, series has {}",
            series.len()
        )));
    }
    let graphs = snapshot_graphs(series);
    Ok(graphs
        .windows(lag + 1)
        .map(|w| decayed_sum(w, params.alpha, &graphs[0]))
        .collect())
}

fn snapshot_graphs(series: &GraphTimeSeries) -> Vec<WeightedGraph> {
    let universe = series.universe();
    series
        .snapshots
        .iter()
        .map(|s| snapshot_graph(s, universe))
        .collect()
}
