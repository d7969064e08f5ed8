//! Role-style embedding built from local degree and neighbourhood statistics.

use super::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::models::WeightedGraph;

/// Per-node features before expansion: log in-weight, log out-weight, mean and
/// max log total weight over neighbours, local clustering, log neighbour count.
pub const BASE_FEATURES: usize = 6;

fn base_features(graph: &WeightedGraph) -> (Vec<[f64; BASE_FEATURES]>, Vec<bool>) {
    let n = graph.num_nodes;
    let words = n.div_ceil(64);
    let mut in_w = vec![0.0; n];
    let mut out_w = vec![0.0; n];
    let mut adj = vec![0u64; n * words];
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, w) in graph.arcs() {
        let (i, j) = (i.index(), j.index());
        out_w[i] += w;
        in_w[j] += w;
        if i != j {
            for (a, b) in [(i, j), (j, i)] {
                let slot = &mut adj[a * words + b / 64];
                if *slot & (1 << (b % 64)) == 0 {
                    *slot |= 1 << (b % 64);
                    neighbors[a].push(b);
                }
            }
        }
    }
    let active = graph.active_nodes();
    let log_total: Vec<f64> = (0..n).map(|v| (in_w[v] + out_w[v]).ln_1p()).collect();

    let features = (0..n)
        .map(|u| {
            if !active[u] {
                return [0.0; BASE_FEATURES];
            }
            let nb = &neighbors[u];
            let k = nb.len();
            let (mean_nb, max_nb) = if k == 0 {
                (0.0, 0.0)
            } else {
                let vals = nb.iter().map(|&v| log_total[v]);
                (
                    vals.clone().sum::<f64>() / k as f64,
                    vals.fold(0.0, f64::max),
                )
            };
            let clustering = if k < 2 {
                0.0
            } else {
                let row_u = &adj[u * words..(u + 1) * words];
                let links: u32 = nb
                    .iter()
                    .map(|&v| {
                        adj[v * words..(v + 1) * words]
                            .iter()
                            .zip(row_u)
                            .map(|(a, b)| (a & b).count_ones())
                            .sum::<u32>()
                    })
                    .sum();
                // Each neighbour pair is seen from both ends.
                f64::from(links) / (k * (k - 1)) as f64
            };
            [
                in_w[u].ln_1p(),
                out_w[u].ln_1p(),
                mean_nb,
                max_nb,
                clustering,
                (k as f64).ln_1p(),
            ]
        })
        .collect();
    (features, active)
}

/// Column `c` is base feature `c % 6`, min-max scaled over present nodes and
/// raised to the power `1 + c / 6`, then standardized over present nodes.
/// Nodes without arcs keep all-zero rows.
pub fn structural_embed(graph: &WeightedGraph, dim: usize) -> Result<EmbeddingMatrix> {
    if dim < 4 {
        return Err(Error::InvalidParameter(format!(
            "structural embeddings need at least 4 dimensions, got {dim}"
        )));
    }
    let n = graph.num_nodes;
    let (features, active) = base_features(graph);
    let present: Vec<usize> = (0..n).filter(|&u| active[u]).collect();
    let mut out = EmbeddingMatrix::zeros(n, dim);
    if present.is_empty() {
        return Ok(out);
    }

    let mut scaled = features.clone();
    for f in 0..BASE_FEATURES {
        let lo = present
            .iter()
            .map(|&u| features[u][f])
            .fold(f64::INFINITY, f64::min);
        let hi = present
            .iter()
            .map(|&u| features[u][f])
            .fold(f64::NEG_INFINITY, f64::max);
        for &u in &present {
            scaled[u][f] = if hi > lo {
                (features[u][f] - lo) / (hi - lo)
            } else {
                0.0
            };
        }
    }

    let count = present.len() as f64;
    let mut column = vec![0.0; present.len()];
    for c in 0..dim {
        let (f, power) = (c % BASE_FEATURES, (1 + c / BASE_FEATURES) as i32);
        for (slot, &u) in column.iter_mut().zip(&present) {
            *slot = scaled[u][f].powi(power);
        }
        let mean = column.iter().sum::<f64>() / count;
        let var = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        let std = var.sqrt();
        if std > 1e-12 {
            for (&v, &u) in column.iter().zip(&present) {
                out.row_mut(u)[c] = (v - mean) / std;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::NodeId;
    use proptest::prelude::*;

    fn graph(n: usize, directed: bool, arcs: &[(u32, u32, f64)]) -> WeightedGraph {
        let mut g = WeightedGraph::new(n, directed);
        for &(i, j, w) in arcs {
            g.add(NodeId(i), NodeId(j), w);
        }
        g
    }

    #[test]
    fn isolated_nodes_share_zero_rows() {
        let g = graph(5, false, &[(0, 1, 1.0), (1, 2, 2.0)]);
        let z = structural_embed(&g, 8).unwrap();
        assert_eq!(z.row(3), z.row(4));
        assert!(z.row(3).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn symmetric_positions_match() {
        // Cycle 0-1-2-3-0 with one chord 0-2: nodes 1 and 3 are interchangeable.
        let g = graph(
            4,
            false,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 0, 1.0),
                (0, 2, 2.0),
            ],
        );
        let z = structural_embed(&g, 12).unwrap();
        assert_eq!(z.row(1), z.row(3));
        assert_eq!(z.row(0), z.row(2));
        assert_ne!(z.row(0), z.row(1));
    }

    #[test]
    fn star_center_differs_from_leaf() {
        let g = graph(
            5,
            false,
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)],
        );
        let z = structural_embed(&g, 6).unwrap();
        assert_ne!(z.row(0), z.row(1));
        assert_eq!(z.row(1), z.row(4));
    }

    #[test]
    fn clustering_of_triangle_is_one() {
        let g = graph(
            4,
            false,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (2, 3, 1.0)],
        );
        let (f, _) = base_features(&g);
        assert_eq!(f[0][4], 1.0);
        assert!((f[2][4] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(f[3][4], 0.0);
    }

    #[test]
    fn small_dimension_rejected() {
        assert!(structural_embed(&graph(3, true, &[]), 3).is_err());
    }

    proptest! {
        #[test]
        fn relabeling_permutes_rows(
            arcs in prop::collection::vec((0u32..8, 0u32..8, 1u32..5), 0..20),
            shift in 1u32..8,
        ) {
            let arcs: Vec<(u32, u32, f64)> = arcs.into_iter().map(|(i, j, w)| (i, j, f64::from(w))).collect();
            let relabel = |v: u32| (v + shift) % 8;
            let g = graph(8, true, &arcs);
            let h = graph(8, true, &arcs.iter().map(|&(i, j, w)| (relabel(i), relabel(j), w)).collect::<Vec<_>>());
            let zg = structural_embed(&g, 9).unwrap();
            let zh = structural_embed(&h, 9).unwrap();
            for v in 0..8u32 {
                for (a, b) in zg.row(v as usize).iter().zip(zh.row(relabel(v) as usize)) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }
}
