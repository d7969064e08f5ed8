//! Temporal network models. Each one reduces (part of) a graph time-series to
//! a static weighted graph.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::series::{GraphTimeSeries, Snapshot};
use crate::stream::{NodeId, NodeTable};

mod reach;
mod tsg;

pub use reach::{
    build_trg, build_wtrg, build_wtrg_detailed, ReachEntry, ReachSet, WtrgBuild, WtrgOptions,
    WtrgStats,
};
pub use tsg::{build_tsg, tsg_series, TsgParams};

/// Size and directedness of the node universe shared by every graph of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Universe {
    pub num_nodes: usize,
    pub directed: bool,
}

impl GraphTimeSeries {
    pub fn universe(&self) -> Universe {
        Universe {
            num_nodes: self.num_nodes,
            directed: self.directed,
        }
    }
}

/// Static weighted graph over the global node universe. Absent arcs are
/// implicit zeros; stored weights are positive. Undirected graphs store both
/// orientations of every arc.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedGraph {
    pub num_nodes: usize,
    pub directed: bool,
    arcs: BTreeMap<(NodeId, NodeId), f64>,
}

impl WeightedGraph {
    pub fn new(num_nodes: usize, directed: bool) -> Self {
        Self {
            num_nodes,
            directed,
            arcs: BTreeMap::new(),
        }
    }

    pub fn universe(&self) -> Universe {
        Universe {
            num_nodes: self.num_nodes,
            directed: self.directed,
        }
    }

    /// Adds `w` to arc `(i, j)` (and `(j, i)` when undirected). Non-positive
    /// weights are ignored.
    pub fn add(&mut self, i: NodeId, j: NodeId, w: f64) {
        assert!(
            i.index() < self.num_nodes && j.index() < self.num_nodes,
            "arc ({i}, {j}) outside a universe of {} nodes",
            self.num_nodes
        );
        if w.is_nan() || w <= 0.0 {
            return;
        }
        *self.arcs.entry((i, j)).or_insert(0.0) += w;
        if !self.directed && i != j {
            *self.arcs.entry((j, i)).or_insert(0.0) += w;
        }
    }

    /// Sets a directed arc weight without symmetrizing. Zero removes the arc.
    pub(crate) fn set_arc(&mut self, i: NodeId, j: NodeId, w: f64) {
        if w > 0.0 {
            self.arcs.insert((i, j), w);
        } else {
            self.arcs.remove(&(i, j));
        }
    }

    pub fn weight(&self, i: NodeId, j: NodeId) -> f64 {
        self.arcs.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, i: NodeId, j: NodeId) -> bool {
        self.arcs.contains_key(&(i, j))
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Arcs in `(src, dst)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.arcs.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn total_weight(&self) -> f64 {
        self.arcs.values().sum()
    }

    /// Same arc set with every weight set to 1.
    pub fn support(&self) -> WeightedGraph {
        WeightedGraph {
            num_nodes: self.num_nodes,
            directed: self.directed,
            arcs: self.arcs.keys().map(|&k| (k, 1.0)).collect(),
        }
    }

    /// Nodes with at least one incident arc.
    pub fn active_nodes(&self) -> Vec<bool> {
        let mut active = vec![false; self.num_nodes];
        for &(i, j) in self.arcs.keys() {
            active[i.index()] = true;
            active[j.index()] = true;
        }
        active
    }

    /// Writes `src,dst,weight` rows using external node names.
    pub fn write_csv<W: Write>(&self, nodes: &NodeTable, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let name = |id: NodeId| {
            nodes
                .name(id)
                .map(str::to_owned)
                .unwrap_or_else(|| id.to_string())
        };
        let res = w.write_record(["src", "dst", "weight"]).and_then(|_| {
            self.arcs()
                .try_for_each(|(i, j, wt)| w.write_record([name(i), name(j), wt.to_string()]))
        });
        res.and_then(|_| w.flush().map_err(Into::into))
            .map_err(|e| Error::Output(e.to_string()))
    }
}

/// Snapshot graph: arc weight is the number of contacts between the pair,
/// timestamps dropped.
pub fn snapshot_graph(snap: &Snapshot, universe: Universe) -> WeightedGraph {
    let mut g = WeightedGraph::new(universe.num_nodes, universe.directed);
    for e in &snap.edges {
        g.add(e.src, e.dst, 1.0);
    }
    g
}

/// Union of every snapshot with multiplicity weights.
pub fn static_model(series: &GraphTimeSeries) -> WeightedGraph {
    let mut g = WeightedGraph::new(series.num_nodes, series.directed);
    for e in series.edges() {
        g.add(e.src, e.dst, 1.0);
    }
    g
}
