use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Snapshot;
use crate::stream::NodeId;

type Pair = (NodeId, NodeId);

fn orient(pair: Pair, directed: bool) -> Pair {
    if directed || pair.0 <= pair.1 {
        pair
    } else {
        (pair.1, pair.0)
    }
}

/// Distinct node pairs of the snapshot in first-seen order, self-loops
/// excluded. Undirected pairs are stored as `(min, max)`.
pub fn positive_pairs(test: &Snapshot, directed: bool) -> Vec<Pair> {
    let mut seen = HashSet::new();
    test.edges
        .iter()
        .filter(|e| e.src != e.dst)
        .map(|e| orient((e.src, e.dst), directed))
        .filter(|p| seen.insert(*p))
        .collect()
}

/// Uniformly samples `count` distinct pairs of distinct candidate nodes that
/// are not connected in `test`.
pub fn sample_negatives(
    test: &Snapshot,
    candidates: &[NodeId],
    count: usize,
    directed: bool,
    seed: u64,
) -> Result<Vec<Pair>> {
    let forbidden: HashSet<Pair> = test
        .edges
        .iter()
        .map(|e| orient((e.src, e.dst), directed))
        .collect();
    let nodes: Vec<NodeId> = {
        let mut v = candidates.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let members: HashSet<NodeId> = nodes.iter().copied().collect();
    let n = nodes.len();
    let all_pairs = if directed {
        n * n.saturating_sub(1)
    } else {
        n * n.saturating_sub(1) / 2
    };
    let blocked = forbidden
        .iter()
        .filter(|(a, b)| a != b && members.contains(a) && members.contains(b))
        .count();
    let available = all_pairs - blocked;
    if count > available {
        return Err(Error::InsufficientNonEdges {
            requested: count,
            available,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if 2 * count > available {
        // Dense regime: enumerate the non-edges and take a random subset.
        let mut pool: Vec<Pair> = Vec::with_capacity(available);
        for (x, &a) in nodes.iter().enumerate() {
            let partners = if directed {
                &nodes[..]
            } else {
                &nodes[x + 1..]
            };
            for &b in partners {
                if a != b && !forbidden.contains(&(a, b)) {
                    pool.push((a, b));
                }
            }
        }
        pool.shuffle(&mut rng);
        pool.truncate(count);
        return Ok(pool);
    }

    let mut chosen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = nodes[rng.random_range(0..n)];
        let b = nodes[rng.random_range(0..n)];
        if a == b {
            continue;
        }
        let p = orient((a, b), directed);
        if !forbidden.contains(&p) && chosen.insert(p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Hold-out positives with an equal number of sampled non-edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledEdgeSet {
    pub positives: Vec<Pair>,
    pub negatives: Vec<Pair>,
    pub seed: u64,
}

impl LabeledEdgeSet {
    pub fn build(
        test: &Snapshot,
        candidates: &[NodeId],
        directed: bool,
        seed: u64,
    ) -> Result<Self> {
        let positives = positive_pairs(test, directed);
        let negatives = sample_negatives(test, candidates, positives.len(), directed, seed)?;
        Ok(Self {
            positives,
            negatives,
            seed,
        })
    }

    /// All pairs with labels, positives first.
    pub fn examples(&self) -> impl Iterator<Item = (Pair, bool)> + '_ {
        self.positives
            .iter()
            .map(|&p| (p, true))
            .chain(self.negatives.iter().map(|&p| (p, false)))
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::TemporalEdge;

    fn snap(edges: &[(u32, u32)]) -> Snapshot {
        Snapshot::from_edges(
            1,
            edges
                .iter()
                .enumerate()
                .map(|(k, &(u, v))| TemporalEdge {
                    src: NodeId(u),
                    dst: NodeId(v),
                    time: k as f64,
                })
                .collect(),
        )
    }

    fn universe(n: u32) -> Vec<NodeId> {
        (0..n).map(NodeId).collect()
    }

    #[test]
    fn equal_count_and_absent_from_test() {
        let edges: Vec<(u32, u32)> = (0..100)
            .map(|k| (k % 40, (k * 7 + 1) % 40))
            .filter(|(a, b)| a != b)
            .collect();
        let test = snap(&edges);
        let set = LabeledEdgeSet::build(&test, &universe(60), true, 3).unwrap();
        assert_eq!(set.negatives.len(), set.positives.len());
        let pos: HashSet<_> = set.positives.iter().collect();
        assert!(set.negatives.iter().all(|p| !pos.contains(p) && p.0 != p.1));
        let uniq: HashSet<_> = set.negatives.iter().collect();
        assert_eq!(uniq.len(), set.negatives.len());
    }

    #[test]
    fn hundred_positives_hundred_negatives() {
        let edges: Vec<(u32, u32)> = (0..100).map(|k| (k, k + 100)).collect();
        let test = snap(&edges);
        assert_eq!(positive_pairs(&test, false).len(), 100);
        assert_eq!(
            sample_negatives(&test, &universe(200), 100, false, 1)
                .unwrap()
                .len(),
            100
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let test = snap(&[(0, 1), (1, 2)]);
        let a = sample_negatives(&test, &universe(30), 20, false, 9).unwrap();
        let b = sample_negatives(&test, &universe(30), 20, false, 9).unwrap();
        let c = sample_negatives(&test, &universe(30), 20, false, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn complete_graph_has_no_negatives() {
        let undirected = snap(&[(0, 1), (1, 2), (2, 0)]);
        assert!(matches!(
            sample_negatives(&undirected, &universe(3), 1, false, 0),
            Err(Error::InsufficientNonEdges { available: 0, .. })
        ));
        let directed = snap(&[(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)]);
        assert!(sample_negatives(&directed, &universe(3), 1, true, 0).is_err());
    }

    #[test]
    fn dense_regime_enumerates() {
        // 4 nodes undirected: 6 pairs, 3 used, 3 available.
        let test = snap(&[(0, 1), (1, 2), (2, 3)]);
        let mut got = sample_negatives(&test, &universe(4), 3, false, 5).unwrap();
        got.sort();
        assert_eq!(
            got,
            vec![
                (NodeId(0), NodeId(2)),
                (NodeId(0), NodeId(3)),
                (NodeId(1), NodeId(3))
            ]
        );
    }

    #[test]
    fn undirected_orientation_is_blocked_both_ways() {
        let test = snap(&[(3, 1)]);
        let got = sample_negatives(&test, &universe(3), 2, false, 1).unwrap();
        assert!(!got.contains(&(NodeId(1), NodeId(3))));
        assert_eq!(positive_pairs(&test, false), vec![(NodeId(1), NodeId(3))]);
    }
}
