//! Temporal reachability graphs.
//!
//! A temporal walk is a sequence of contacts with strictly increasing
//! timestamps. The reachability graph has an arc `(u, v)` whenever some walk
//! leaves `u` and arrives at `v` inside the snapshot; the weighted variant sums
//! `exp(-(t_last - t_first))` over all such walks.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Universe, WeightedGraph};
use crate::series::Snapshot;
use crate::stream::{NodeId, TemporalEdge};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtrgOptions {
    /// Map the snapshot's timestamps affinely onto `[0, 1]` before computing
    /// walk delays. Without it, gaps of many time units underflow
    /// `exp(-dt)` to zero.
    pub rescale_time: bool,
}

/// One `(node, time)` entry of a temporally reachable neighbourhood, with the
/// number of distinct walks it stands for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachEntry {
    pub node: NodeId,
    /// Timestamp of the contact that reaches `node`.
    pub time: f64,
    pub walks: f64,
}

/// Temporally reachable neighbourhood of one node. Entries are unique per
/// `(node, time)`; walks that end with the same contact time at the same node
/// are folded into the entry's walk count.
#[derive(Debug, Clone, Default)]
pub struct ReachSet {
    entries: Vec<ReachEntry>,
    lookup: HashMap<(NodeId, u64), usize>,
}

impl ReachSet {
    fn insert(&mut self, node: NodeId, time: f64, walks: f64) {
        // Timestamps are non-negative, so the bit pattern orders and hashes
        // consistently with the value.
        let key = (node, time.to_bits());
        match self.lookup.get(&key) {
            Some(&pos) => self.entries[pos].walks += walks,
            None => {
                self.lookup.insert(key, self.entries.len());
                self.entries.push(ReachEntry { node, time, walks });
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in insertion order.
    pub fn entries(&self) -> &[ReachEntry] {
        &self.entries
    }
}

/// Counters collected while building a weighted reachability graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtrgStats {
    /// Number of directed contacts in the window.
    pub omega: usize,
    /// Reach-set insertions performed by the sweep.
    pub insertions: usize,
    pub max_reach_set: usize,
}

#[derive(Debug, Clone)]
pub struct WtrgBuild {
    pub graph: WeightedGraph,
    /// Final reachable neighbourhood of every node in the universe.
    pub reach_sets: Vec<ReachSet>,
    pub stats: WtrgStats,
}

/// Directed contacts of a snapshot. Undirected contacts become two arcs with
/// the same timestamp.
fn directed_contacts(snap: &Snapshot, universe: Universe) -> Vec<TemporalEdge> {
    let mut out = Vec::with_capacity(snap.edges.len() * if universe.directed { 1 } else { 2 });
    for e in &snap.edges {
        out.push(*e);
        if !universe.directed && e.src != e.dst {
            out.push(TemporalEdge {
                src: e.dst,
                dst: e.src,
                time: e.time,
            });
        }
    }
    out
}

fn rescale(edges: &mut [TemporalEdge]) {
    let lo = edges.iter().map(|e| e.time).fold(f64::INFINITY, f64::min);
    let hi = edges
        .iter()
        .map(|e| e.time)
        .fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for e in edges {
        e.time = if span > 0.0 {
            (e.time - lo) / span
        } else {
            0.0
        };
    }
}

/// Weighted temporal reachability graph. See [`build_wtrg_detailed`].
pub fn build_wtrg(snap: &Snapshot, universe: Universe, opts: WtrgOptions) -> WeightedGraph {
    build_wtrg_detailed(snap, universe, opts).graph
}

/// Reverse-time sweep over the snapshot's contacts.
///
/// For a contact `(i, j, t)`, every entry `(k, t_k)` already in the reach set
/// of `j` extends to walks from `i`: `g[i][k]` gains `exp(-(t_k - t))` per walk
/// and `(k, t_k)` joins the reach set of `i`. The contact itself adds 1 to
/// `g[i][j]` and `(j, t)` to the reach set of `i`.
///
/// Contacts sharing a timestamp are processed as one batch that reads the reach
/// sets as they were before the batch, so walks never chain two contacts with
/// equal times.
pub fn build_wtrg_detailed(snap: &Snapshot, universe: Universe, opts: WtrgOptions) -> WtrgBuild {
    let mut contacts = directed_contacts(snap, universe);
    if opts.rescale_time {
        rescale(&mut contacts);
    }
    // Latest first; stable, so equal timestamps keep stream order.
    contacts.sort_by(|a, b| b.time.total_cmp(&a.time));

    let mut reach: Vec<ReachSet> = vec![ReachSet::default(); universe.num_nodes];
    let mut weights: HashMap<(NodeId, NodeId), f64> = HashMap::new();
    let mut order: Vec<(NodeId, NodeId)> = Vec::new();
    let mut pending: Vec<(NodeId, ReachEntry, f64)> = Vec::new();
    let mut insertions = 0usize;

    for batch in contacts.chunk_by(|a, b| a.time == b.time) {
        pending.clear();
        for e in batch {
            pending.extend(
                reach[e.dst.index()]
                    .entries
                    .iter()
                    .map(|&entry| (e.src, entry, e.time)),
            );
            pending.push((
                e.src,
                ReachEntry {
                    node: e.dst,
                    time: e.time,
                    walks: 1.0,
                },
                e.time,
            ));
        }
        for &(i, entry, t) in &pending {
            let delay = entry.time - t;
            let contribution = if delay == 0.0 {
                entry.walks
            } else {
                entry.walks * (-delay).exp()
            };
            let slot = weights.entry((i, entry.node)).or_insert_with(|| {
                order.push((i, entry.node));
                0.0
            });
            *slot += contribution;
            reach[i.index()].insert(entry.node, entry.time, entry.walks);
            insertions += 1;
        }
    }

    let mut graph = WeightedGraph::new(universe.num_nodes, true);
    for key in order {
        graph.set_arc(key.0, key.1, weights[&key]);
    }
    let stats = WtrgStats {
        omega: contacts.len(),
        insertions,
        max_reach_set: reach.iter().map(ReachSet::len).max().unwrap_or(0),
    };
    WtrgBuild {
        graph,
        reach_sets: reach,
        stats,
    }
}

/// Unweighted temporal reachability graph, computed per source with an
/// earliest-arrival sweep in forward time.
pub fn build_trg(snap: &Snapshot, universe: Universe) -> WeightedGraph {
    let mut contacts = directed_contacts(snap, universe);
    contacts.sort_by(|a, b| a.time.total_cmp(&b.time));

    let n = universe.num_nodes;
    let mut is_source = vec![false; n];
    for e in &contacts {
        is_source[e.src.index()] = true;
    }

    let mut graph = WeightedGraph::new(n, true);
    let mut arrival = vec![f64::INFINITY; n];
    let mut reached = vec![false; n];
    for source in (0..n).filter(|&s| is_source[s]) {
        arrival.fill(f64::INFINITY);
        reached.fill(false);
        arrival[source] = f64::NEG_INFINITY;
        for e in &contacts {
            let (x, y) = (e.src.index(), e.dst.index());
            if arrival[x] < e.time {
                reached[y] = true;
                if e.time < arrival[y] {
                    arrival[y] = e.time;
                }
            }
        }
        for (target, _) in reached.iter().enumerate().filter(|(_, &r)| r) {
            graph.set_arc(NodeId::from(source), NodeId::from(target), 1.0);
        }
    }
    graph
}
