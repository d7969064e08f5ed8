//! Shared fixtures for the criterion benchmarks.

use tgembed::models::{snapshot_graph, Universe};
use tgembed::series::{partition_tau, Snapshot};
use tgembed::synth::{planted_stream, SyntheticParams};
use tgembed::{EdgeStream, WeightedGraph};

/// Synthetic bursty stream with `edges` undirected edges over `nodes` nodes.
pub fn stream(nodes: usize, edges: usize) -> EdgeStream {
    let params = SyntheticParams {
        num_nodes: nodes,
        num_edges: edges,
        ..SyntheticParams::default()
    };
    planted_stream(&params, 1).expect("valid synthetic parameters")
}

/// The whole stream as a single snapshot, with its universe.
pub fn snapshot(nodes: usize, edges: usize) -> (Snapshot, Universe) {
    let s = stream(nodes, edges);
    let universe = Universe {
        num_nodes: s.num_nodes(),
        directed: s.directed,
    };
    (Snapshot::from_edges(1, s.edges), universe)
}

/// The busiest tau-snapshot of a default-sized stream as a static graph.
pub fn busy_graph(nodes: usize) -> WeightedGraph {
    let s = stream(nodes, 10_000);
    let series = partition_tau(&s, 100.0).expect("positive tau");
    let busiest = series
        .snapshots
        .iter()
        .max_by_key(|snap| snap.len())
        .expect("non-empty series");
    snapshot_graph(busiest, series.universe())
}
