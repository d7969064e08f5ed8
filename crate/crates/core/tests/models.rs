mod common;

use proptest::prelude::*;
use tgembed::models::{
    build_trg, build_tsg, build_wtrg, build_wtrg_detailed, TsgParams, Universe, WtrgOptions,
};
use tgembed::series::{partition_tau, Snapshot};
use tgembed::stream::{EdgeStream, TemporalEdge};

use common::{enumerate_walks, rel_close};

fn snapshot_strategy(max_edges: usize) -> impl Strategy<Value = (Snapshot, Universe)> {
    (2usize..7, any::<bool>()).prop_flat_map(move |(nodes, directed)| {
        prop::collection::vec((0..nodes, 0..nodes, 0u8..8), 1..=max_edges).prop_map(move |raw| {
            let mut edges: Vec<TemporalEdge> = raw
                .into_iter()
                .map(|(s, d, t)| TemporalEdge::new(s, d, f64::from(t) * 0.25))
                .collect();
            edges.sort_by(|a, b| a.time.total_cmp(&b.time));
            (
                Snapshot::from_edges(1, edges),
                Universe {
                    num_nodes: nodes,
                    directed,
                },
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn wtrg_matches_walk_enumeration((snap, u) in snapshot_strategy(10)) {
        let census = enumerate_walks(&snap, u.directed);
        let g = build_wtrg(&snap, u, WtrgOptions::default());
        prop_assert_eq!(g.num_arcs(), census.weights.len());
        for (&(i, j), &want) in &census.weights {
            prop_assert!(rel_close(g.weight(i.into(), j.into()), want, 1e-9));
        }
        prop_assert!(g.num_arcs() as u64 <= census.walks);
    }

    #[test]
    fn reach_sets_stay_within_omega((snap, u) in snapshot_strategy(40)) {
        let build = build_wtrg_detailed(&snap, u, WtrgOptions::default());
        let s = build.stats;
        prop_assert!(build.reach_sets.iter().all(|r| r.len() <= s.omega));
        prop_assert!(s.max_reach_set <= s.omega);
        prop_assert!(s.insertions <= s.omega * s.omega);
    }

    #[test]
    fn trg_is_wtrg_support((snap, u) in snapshot_strategy(40)) {
        let wtrg = build_wtrg(&snap, u, WtrgOptions { rescale_time: true });
        prop_assert_eq!(build_trg(&snap, u), wtrg.support());
    }

    #[test]
    fn rescaling_keeps_the_support((snap, u) in snapshot_strategy(25)) {
        let raw = build_wtrg(&snap, u, WtrgOptions::default());
        let scaled = build_wtrg(&snap, u, WtrgOptions { rescale_time: true });
        prop_assert_eq!(raw.support(), scaled.support());
    }

    #[test]
    fn tsg_weights_fall_as_alpha_grows(
        (snap, u) in snapshot_strategy(15),
        a in 0.01f64..0.98,
        b in 0.01f64..0.98,
    ) {
        // The edges sit in the first of two snapshots; the last one holds a
        // single unrelated self-loop, so every weight is a pure decay factor.
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut edges = snap.edges.clone();
        edges.push(TemporalEdge::new(0usize, 0usize, 9.0));
        let stream = EdgeStream::from_edges(edges, u.num_nodes, u.directed);
        let series = partition_tau(&stream, 5.0).unwrap();
        prop_assert_eq!(series.len(), 2);
        let s_lo = build_tsg(&series, &TsgParams::new(lo).unwrap()).unwrap();
        let s_hi = build_tsg(&series, &TsgParams::new(hi).unwrap()).unwrap();
        for (i, j, w) in s_lo.arcs() {
            if (i.index(), j.index()) != (0, 0) {
                prop_assert!(s_hi.weight(i, j) <= w);
            }
        }
    }
}
