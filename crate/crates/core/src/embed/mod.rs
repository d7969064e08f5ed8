//! Per-snapshot node embeddings and their temporal fusion.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::WeightedGraph;
use crate::stream::{NodeId, NodeTable};

mod fusion;
mod spectral;
mod structural;

pub use fusion::{concat_allocation, fuse, fuse_concat, fuse_smooth, FusionMode, FusionParams};
pub use spectral::{
    spectral_embed, spectral_factorize, SpectralFactors, MAX_ITERATIONS, RESIDUAL_TOLERANCE,
};
pub use structural::{structural_embed, BASE_FEATURES};

/// Row-major `|V| x d` matrix; row `i` embeds global node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn from_vec(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} values cannot fill a {rows}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn scale_add(&mut self, self_scale: f64, other: &EmbeddingMatrix, other_scale: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = self_scale * *a + other_scale * b;
        }
    }

    /// Writes `node_id,z_1,...,z_d` rows.
    pub fn write_csv<W: Write>(&self, nodes: &NodeTable, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["node_id".to_owned()];
        header.extend((1..=self.dim).map(|k| format!("z_{k}")));
        let mut res = w.write_record(&header);
        for i in 0..self.rows {
            if res.is_err() {
                break;
            }
            let id = NodeId::from(i);
            let mut rec = vec![nodes
                .name(id)
                .map(str::to_owned)
                .unwrap_or_else(|| id.to_string())];
            rec.extend(self.row(i).iter().map(f64::to_string));
            res = w.write_record(&rec);
        }
        res.and_then(|_| w.flush().map_err(Into::into))
            .map_err(|e| Error::Output(e.to_string()))
    }
}

/// In-repo base embedding methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseMethod {
    /// Proximity-flavoured: truncated factorization of the weight matrix.
    Spectral,
    /// Role-flavoured: degree and neighbourhood statistics.
    Structural,
}

impl BaseMethod {
    pub const ALL: [BaseMethod; 2] = [BaseMethod::Spectral, BaseMethod::Structural];

    pub fn name(self) -> &'static str {
        match self {
            BaseMethod::Spectral => "spectral",
            BaseMethod::Structural => "structural",
        }
    }

    pub fn embed(self, graph: &WeightedGraph, dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
        match self {
            BaseMethod::Spectral => spectral_embed(graph, dim, seed),
            BaseMethod::Structural => structural_embed(graph, dim),
        }
    }
}

impl fmt::Display for BaseMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(BaseMethod::Spectral),
            "structural" => Ok(BaseMethod::Structural),
            _ => Err(Error::Unknown {
                kind: "base embedding method",
                name: s.to_owned(),
            }),
        }
    }
}

/// Embeds every graph of a series with the named method. `dims[t]` is the
/// dimension for graph `t`; graphs are embedded in parallel but each result
/// depends only on its graph, dimension and `seed`.
pub fn embed_series(
    graphs: &[WeightedGraph],
    method: &str,
    dims: &[usize],
    seed: u64,
) -> Result<Vec<EmbeddingMatrix>> {
    let method: BaseMethod = method.parse()?;
    if dims.len() != graphs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} dimensions given for {} graphs",
            dims.len(),
            graphs.len()
        )));
    }
    if let Some(g) = graphs.iter().find(|g| g.num_nodes != graphs[0].num_nodes) {
        return Err(Error::DimensionMismatch(format!(
            "graphs span {} and {} nodes",
            graphs[0].num_nodes, g.num_nodes
        )));
    }
    graphs
        .par_iter()
        .zip(dims)
        .map(|(g, &d)| method.embed(g, d, seed))
        .collect()
}
