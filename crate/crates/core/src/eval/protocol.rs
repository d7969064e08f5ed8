use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{partition_epsilon, partition_tau, GraphTimeSeries, Snapshot};
use crate::stream::EdgeStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub tau: f64,
    /// Training snapshots; the next tau-snapshot is the hold-out.
    pub train_count: usize,
    /// 0-based position of the first training snapshot in the tau-series.
    /// Defaults to `floor(T/3)`, pulled back so the hold-out still exists.
    pub start_offset: Option<usize>,
}

impl ProtocolParams {
    pub fn new(tau: f64, train_count: usize) -> Self {
        Self {
            tau,
            train_count,
            start_offset: None,
        }
    }
}

/// Training windows for both representations plus the shared hold-out.
#[derive(Debug, Clone)]
pub struct ProtocolSplit {
    /// `train_count` consecutive tau-snapshots ending just before the test.
    pub tau_series: GraphTimeSeries,
    /// Groups of `epsilon` edges ending just before the test snapshot.
    pub epsilon_series: GraphTimeSeries,
    pub test_snapshot: Snapshot,
    /// Size of the hold-out snapshot, used as the epsilon group size.
    pub epsilon: usize,
    pub start_offset: usize,
    /// Length of the full tau-series.
    pub tau_snapshots: usize,
}

/// [`align_protocol_with`] with the default start offset.
pub fn align_protocol(stream: &EdgeStream, tau: f64, train_count: usize) -> Result<ProtocolSplit> {
    align_protocol_with(stream, &ProtocolParams::new(tau, train_count))
}

/// Fixes the hold-out as a tau-snapshot, then sets `epsilon` to its edge count
/// so the epsilon-series predicts the same snapshot. The epsilon groups are
/// aligned backwards from the start of the hold-out, so the most recent group
/// ends right where the test begins.
pub fn align_protocol_with(stream: &EdgeStream, params: &ProtocolParams) -> Result<ProtocolSplit> {
    if params.train_count == 0 {
        return Err(Error::InvalidParameter(
            "train_count must be at least 1".into(),
        ));
    }
    let full = partition_tau(stream, params.tau)?;
    let t = full.len();
    let needed = params.train_count + 1;
    if t < needed {
        return Err(Error::TooFewSnapshots {
            needed,
            available: t,
        });
    }
    let latest_start = t - needed;
    let start = match params.start_offset {
        Some(o) if o > latest_start => {
            return Err(Error::TooFewSnapshots {
                needed: o + needed,
                available: t,
            })
        }
        Some(o) => o,
        None => (t / 3).min(latest_start),
    };
    let test_pos = start + params.train_count;
    let test_snapshot = full.snapshots[test_pos].clone();
    let epsilon = test_snapshot.len();
    if epsilon == 0 {
        return Err(Error::Empty(format!(
            "hold-out tau-snapshot {} has no edges",
            test_snapshot.index
        )));
    }

    let prefix_len = stream
        .edges
        .partition_point(|e| e.time < test_snapshot.start);
    let groups = (prefix_len / epsilon).min(params.train_count);
    if groups == 0 {
        return Err(Error::Empty(format!(
            "{prefix_len} edges precede the hold-out, fewer than epsilon = {epsilon}"
        )));
    }
    let window = EdgeStream {
        edges: stream.edges[prefix_len - groups * epsilon..prefix_len].to_vec(),
        nodes: stream.nodes.clone(),
        directed: stream.directed,
        skipped_lines: 0,
    };
    let epsilon_series = partition_epsilon(&window, epsilon)?;
    if groups < params.train_count {
        log::warn!(
            "only {groups} epsilon-snapshots of {epsilon} edges fit before the hold-out (wanted {})",
            params.train_count
        );
    }

    Ok(ProtocolSplit {
        tau_series: full.slice(start..test_pos),
        epsilon_series,
        test_snapshot,
        epsilon,
        start_offset: start,
        tau_snapshots: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::edge_count_profile;
    use crate::stream::TemporalEdge;

    /// `counts[k]` edges spread inside unit-length bucket `k`.
    fn bucketed(counts: &[usize]) -> EdgeStream {
        let mut edges = Vec::new();
        for (k, &c) in counts.iter().enumerate() {
            for m in 0..c {
                edges.push(TemporalEdge::new(
                    m % 11,
                    (m * 7 + k) % 11,
                    k as f64 + m as f64 / (c as f64 + 1.0),
                ));
            }
        }
        EdgeStream::from_edges(edges, 11, true)
    }

    #[test]
    fn epsilon_follows_test_size() {
        let stream = bucketed(&[500, 800, 300, 900, 400, 700, 500]);
        let split = align_protocol(&stream, 1.0, 6).unwrap();
        assert_eq!(split.test_snapshot.index, 7);
        assert_eq!(split.epsilon, 500);
        assert_eq!(split.tau_series.len(), 6);
        assert_eq!(split.epsilon_series.len(), 6);
        assert!(edge_count_profile(&split.epsilon_series)
            .iter()
            .all(|&c| c == 500));
        // The most recent group ends right before the hold-out.
        let last = split
            .epsilon_series
            .snapshots
            .last()
            .unwrap()
            .edges
            .last()
            .unwrap();
        let before: Vec<_> = stream.edges.iter().filter(|e| e.time < 6.0).collect();
        assert_eq!(last, *before.last().unwrap());
    }

    #[test]
    fn too_few_snapshots() {
        let stream = bucketed(&[5, 5, 5]);
        assert!(matches!(
            align_protocol(&stream, 1.0, 6),
            Err(Error::TooFewSnapshots {
                needed: 7,
                available: 3
            })
        ));
    }

    #[test]
    fn minimal_protocol() {
        let stream = bucketed(&[4, 4]);
        let split = align_protocol(&stream, 1.0, 1).unwrap();
        assert_eq!(split.tau_series.snapshots[0].index, 1);
        assert_eq!(split.test_snapshot.index, 2);
        assert_eq!(split.epsilon_series.len(), 1);
    }

    #[test]
    fn default_offset_is_a_third() {
        let stream = bucketed(&[3; 12]);
        let split = align_protocol(&stream, 1.0, 6).unwrap();
        assert_eq!(split.start_offset, 4);
        assert_eq!(split.test_snapshot.index, 11);

        let explicit = ProtocolParams {
            start_offset: Some(0),
            ..ProtocolParams::new(1.0, 6)
        };
        assert_eq!(
            align_protocol_with(&stream, &explicit)
                .unwrap()
                .test_snapshot
                .index,
            7
        );
        let too_late = ProtocolParams {
            start_offset: Some(6),
            ..explicit
        };
        assert!(align_protocol_with(&stream, &too_late).is_err());
    }

    #[test]
    fn empty_hold_out_is_rejected() {
        let stream = bucketed(&[3, 3, 0, 3]);
        let params = ProtocolParams {
            start_offset: Some(0),
            ..ProtocolParams::new(1.0, 2)
        };
        assert!(matches!(
            align_protocol_with(&stream, &params),
            Err(Error::Empty(_))
        ));
    }
}
