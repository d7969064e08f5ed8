//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tgembed::series::Snapshot;
use tgembed::stream::TemporalEdge;

/// Directed contacts; undirected edges contribute both directions at the same time.
pub fn contacts(snap: &Snapshot, directed: bool) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for e in &snap.edges {
        out.push((e.src.index(), e.dst.index(), e.time));
        if !directed && e.src != e.dst {
            out.push((e.dst.index(), e.src.index(), e.time));
        }
    }
    out
}

/// Every temporal walk (contacts chained head to tail with strictly
/// increasing times), enumerated by depth-first search.
pub struct WalkCensus {
    /// `(start, end) -> sum over walks of exp(-(t_last - t_first))`.
    pub weights: BTreeMap<(usize, usize), f64>,
    pub walks: u64,
}

pub fn enumerate_walks(snap: &Snapshot, directed: bool) -> WalkCensus {
    let c = contacts(snap, directed);
    let mut census = WalkCensus {
        weights: BTreeMap::new(),
        walks: 0,
    };
    fn extend(
        c: &[(usize, usize, f64)],
        start: usize,
        t0: f64,
        last: usize,
        census: &mut WalkCensus,
    ) {
        let (_, head, t) = c[last];
        census.walks += 1;
        *census.weights.entry((start, head)).or_insert(0.0) += (-(t - t0)).exp();
        for next in 0..c.len() {
            if c[next].0 == head && c[next].2 > t {
                extend(c, start, t0, next, census);
            }
        }
    }
    for first in 0..c.len() {
        extend(&c, c[first].0, c[first].2, first, &mut census);
    }
    census
}

/// A snapshot of up to `max_edges` edges over `nodes` nodes. Times come from a
/// small grid so that ties are common.
pub fn random_snapshot(
    rng: &mut ChaCha8Rng,
    nodes: usize,
    max_edges: usize,
    grid: usize,
) -> Snapshot {
    let m = rng.random_range(1..=max_edges);
    let mut edges: Vec<TemporalEdge> = (0..m)
        .map(|_| {
            let t = rng.random_range(0..grid) as f64 * 0.5;
            TemporalEdge::new(rng.random_range(0..nodes), rng.random_range(0..nodes), t)
        })
        .collect();
    edges.sort_by(|a, b| a.time.total_cmp(&b.time));
    Snapshot::from_edges(1, edges)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
