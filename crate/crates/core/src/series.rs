//! Graph time-series: tau (fixed time span) and epsilon (fixed edge count)
//! partitions of a canonical edge stream.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::{EdgeStream, TemporalEdge};

/// How a stream is cut into snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionSpec {
    /// Buckets of a fixed time span.
    Tau(f64),
    /// Groups of a fixed number of consecutive edges.
    Epsilon(usize),
}

impl PartitionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PartitionSpec::Tau(tau) if !(tau.is_finite() && tau > 0.0) => Err(
                Error::InvalidParameter(format!("tau must be positive, got {tau}")),
            ),
            PartitionSpec::Epsilon(0) => {
                Err(Error::InvalidParameter("epsilon must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// One graph of a time-series. `index` is 1-based; edges keep their timestamps
/// and all lie in `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub index: usize,
    pub edges: Vec<TemporalEdge>,
    pub start: f64,
    pub end: f64,
}

impl Snapshot {
    /// Snapshot covering exactly the given edges.
    pub fn from_edges(index: usize, edges: Vec<TemporalEdge>) -> Self {
        let (start, end) = match (edges.first(), edges.last()) {
            (Some(first), Some(last)) => (
                edges.iter().map(|e| e.time).fold(first.time, f64::min),
                edges
                    .iter()
                    .map(|e| e.time)
                    .fold(last.time, f64::max)
                    .next_up(),
            ),
            _ => (0.0, 0.0),
        };
        Self {
            index,
            edges,
            start,
            end,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphTimeSeries {
    pub snapshots: Vec<Snapshot>,
    pub spec: PartitionSpec,
    pub num_nodes: usize,
    pub directed: bool,
    /// Trailing edges that did not fill a complete epsilon group.
    pub dropped_edges: usize,
}

impl GraphTimeSeries {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Edges of all snapshots, in order.
    pub fn edges(&self) -> impl Iterator<Item = &TemporalEdge> {
        self.snapshots.iter().flat_map(|s| s.edges.iter())
    }

    /// Sub-series over a range of snapshot positions (0-based), keeping the
    /// original 1-based indices.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            snapshots: self.snapshots[range].to_vec(),
            dropped_edges: 0,
            ..self.clone()
        }
    }
}

fn require_canonical(stream: &EdgeStream) -> Result<()> {
    if stream.is_canonical() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "edge stream must be canonicalized (sorted by time) before partitioning".into(),
        ))
    }
}

/// Buckets edges by `t0 + (k-1)*tau <= t < t0 + k*tau`, with `t0` the first
/// timestamp. Empty intermediate buckets are kept; the series ends at the
/// bucket holding the last edge.
pub fn partition_tau(stream: &EdgeStream, tau: f64) -> Result<GraphTimeSeries> {
    PartitionSpec::Tau(tau).validate()?;
    require_canonical(stream)?;
    let mut series = GraphTimeSeries {
        snapshots: Vec::new(),
        spec: PartitionSpec::Tau(tau),
        num_nodes: stream.num_nodes(),
        directed: stream.directed,
        dropped_edges: 0,
    };
    let Some(first) = stream.edges.first() else {
        return Ok(series);
    };
    let t0 = first.time;
    let lower = |k: usize| t0 + k as f64 * tau;
    for edge in &stream.edges {
        let mut k = ((edge.time - t0) / tau).floor().max(0.0) as usize;
        // Repair floating-point rounding so the bucket bounds hold exactly.
        while edge.time >= lower(k + 1) {
            k += 1;
        }
        while k > 0 && edge.time < lower(k) {
            k -= 1;
        }
        while series.snapshots.len() <= k {
            let j = series.snapshots.len();
            series.snapshots.push(Snapshot {
                index: j + 1,
                edges: Vec::new(),
                start: lower(j),
                end: lower(j + 1),
            });
        }
        series.snapshots[k].edges.push(*edge);
    }
    Ok(series)
}

/// Groups consecutive edges `e_{(k-1)eps+1} .. e_{k*eps}`. A trailing group
/// with fewer than `eps` edges is left out and counted in `dropped_edges`.
pub fn partition_epsilon(stream: &EdgeStream, epsilon: usize) -> Result<GraphTimeSeries> {
    PartitionSpec::Epsilon(epsilon).validate()?;
    require_canonical(stream)?;
    let chunks = stream.edges.chunks_exact(epsilon);
    let dropped_edges = chunks.remainder().len();
    let snapshots = chunks
        .enumerate()
        .map(|(k, chunk)| Snapshot::from_edges(k + 1, chunk.to_vec()))
        .collect();
    Ok(GraphTimeSeries {
        snapshots,
        spec: PartitionSpec::Epsilon(epsilon),
        num_nodes: stream.num_nodes(),
        directed: stream.directed,
        dropped_edges,
    })
}

/// The last `min(window, T)` snapshots.
pub fn recent_window(series: &GraphTimeSeries, window: usize) -> Result<GraphTimeSeries> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    let t = series.len();
    Ok(series.slice(t.saturating_sub(window)..t))
}

/// Number of temporal edges per snapshot.
pub fn edge_count_profile(series: &GraphTimeSeries) -> Vec<usize> {
    series.snapshots.iter().map(Snapshot::len).collect()
}

/// Writes `snapshot_index,edge_count` rows.
pub fn write_profile_csv<W: Write>(indices: &[usize], counts: &[usize], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let res = w
        .write_record(["snapshot_index", "edge_count"])
        .and_then(|_| {
            indices
                .iter()
                .zip(counts)
                .try_for_each(|(i, c)| w.write_record([i.to_string(), c.to_string()]))
        });
    res.and_then(|_| w.flush().map_err(Into::into))
        .map_err(|e| Error::Output(e.to_string()))
}
