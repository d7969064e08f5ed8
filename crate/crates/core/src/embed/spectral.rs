//! Truncated factorization of a graph's weight matrix by randomized subspace
//! iteration with Rayleigh-Ritz extraction. Small graphs take a dense SVD.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::models::WeightedGraph;

/// Relative residual `||A A^T u - s^2 u|| / s_1^2` at which iteration stops.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 300;
const OVERSAMPLE: usize = 8;
/// Below `DENSE_FACTOR * block` nodes a full decomposition is cheaper than
/// iterating.
const DENSE_FACTOR: usize = 3;

/// Leading left singular directions of a weight matrix.
#[derive(Debug, Clone)]
pub struct SpectralFactors {
    /// `n x d`, orthonormal columns, sign-normalized.
    pub left: DMatrix<f64>,
    /// Non-increasing singular values.
    pub singular_values: Vec<f64>,
    pub iterations: usize,
    /// Largest relative residual among the returned directions.
    pub residual: f64,
}

/// Compressed sparse rows of `A` (by source) and of `A^T` (by target).
struct Csr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut offsets = vec![0; n + 1];
        for &(r, _, _) in &t {
            offsets[r + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Self {
            offsets,
            cols: t.iter().map(|x| x.1).collect(),
            vals: t.iter().map(|x| x.2).collect(),
        }
    }

    fn row_is_empty(&self, r: usize) -> bool {
        self.offsets[r] == self.offsets[r + 1]
    }

    /// `self * x` for a dense block `x`.
    fn mul(&self, x: &Mat<f64>) -> Mat<f64> {
        let n = self.offsets.len() - 1;
        let mut y = Mat::zeros(n, x.ncols());
        for c in 0..x.ncols() {
            for r in 0..n {
                let mut acc = 0.0;
                for k in self.offsets[r]..self.offsets[r + 1] {
                    acc += self.vals[k] * x[(self.cols[k], c)];
                }
                y[(r, c)] = acc;
            }
        }
        y
    }
}

/// Ritz vectors (`n x dim`), Ritz values of `A A^T`, iterations, residual.
type Ritz = (Mat<f64>, Vec<f64>, usize, f64);

/// Top-`dim` left singular directions of the weight matrix.
pub fn spectral_factorize(graph: &WeightedGraph, dim: usize, seed: u64) -> Result<SpectralFactors> {
    let n = graph.num_nodes;
    if dim > n {
        return Err(Error::DimensionTooLarge { dim, nodes: n });
    }
    let triplets: Vec<_> = graph
        .arcs()
        .map(|(i, j, w)| (i.index(), j.index(), w))
        .collect();
    if triplets.is_empty() || dim == 0 {
        return Ok(SpectralFactors {
            left: DMatrix::zeros(n, dim),
            singular_values: vec![0.0; dim],
            iterations: 0,
            residual: 0.0,
        });
    }
    let a = Csr::from_triplets(n, triplets.clone());
    let at = Csr::from_triplets(n, triplets.into_iter().map(|(i, j, w)| (j, i, w)).collect());

    let block = (dim + OVERSAMPLE).min(n);
    let iterative = n > DENSE_FACTOR * block;
    let ritz = if iterative {
        subspace_top(&a, &at, n, dim, block, seed)
    } else {
        dense_top(&a, n, dim)
    }?;
    let (vectors, values, iterations, residual) = ritz;
    let left = DMatrix::from_fn(n, dim, |r, c| vectors[(r, c)]);
    Ok(normalize(left, values, iterations, residual, &a))
}

fn decomposition_failed(e: impl std::fmt::Debug) -> Error {
    Error::NonConvergence(format!("{e:?}"))
}

/// Thin SVD of `A` restricted to its non-zero rows and columns; zero rows
/// and columns carry no singular mass.
fn dense_top(a: &Csr, n: usize, dim: usize) -> Result<Ritz> {
    let rows: Vec<usize> = (0..n).filter(|&r| !a.row_is_empty(r)).collect();
    let mut col_pos = vec![usize::MAX; n];
    let mut cols = 0;
    for &r in &rows {
        for k in a.offsets[r]..a.offsets[r + 1] {
            if col_pos[a.cols[k]] == usize::MAX {
                col_pos[a.cols[k]] = cols;
                cols += 1;
            }
        }
    }
    let mut sub = Mat::<f64>::zeros(rows.len(), cols);
    for (i, &r) in rows.iter().enumerate() {
        for k in a.offsets[r]..a.offsets[r + 1] {
            sub[(i, col_pos[a.cols[k]])] = a.vals[k];
        }
    }
    let svd = sub.thin_svd().map_err(decomposition_failed)?;
    let (u, s) = (svd.U(), svd.S().column_vector());
    // Singular values come out non-increasing.
    let mut vectors = Mat::zeros(n, dim);
    let mut values = vec![0.0; dim];
    for c in 0..dim.min(s.nrows()) {
        values[c] = s[c] * s[c];
        for (i, &r) in rows.iter().enumerate() {
            vectors[(r, c)] = u[(i, c)];
        }
    }
    Ok((vectors, values, 1, 0.0))
}

fn orthonormalize(m: &Mat<f64>) -> Mat<f64> {
    m.qr().compute_thin_Q()
}

fn subspace_top(a: &Csr, at: &Csr, n: usize, dim: usize, block: usize, seed: u64) -> Result<Ritz> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Mat::from_fn(n, block, |_, _| StandardNormal.sample(&mut rng));
    let mut x = orthonormalize(&start);

    let mut iterations = 0;
    loop {
        iterations += 1;
        let y = a.mul(&at.mul(&x));
        let h = x.transpose() * &y;
        let h = Mat::from_fn(block, block, |r, c| 0.5 * (h[(r, c)] + h[(c, r)]));
        let eig = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(decomposition_failed)?;
        // Eigenvalues come out non-decreasing; take the top `dim` from the end.
        let (ev, s) = (eig.U(), eig.S().column_vector());
        let v = Mat::from_fn(block, dim, |r, c| ev[(r, block - 1 - c)]);
        let values: Vec<f64> = (0..dim).map(|c| s[block - 1 - c].max(0.0)).collect();
        let vectors = &x * &v;
        let images = &y * &v;
        let scale = values[0].max(f64::MIN_POSITIVE);
        let residual = (0..dim)
            .map(|c| {
                (0..n)
                    .map(|r| (images[(r, c)] - vectors[(r, c)] * values[c]).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    / scale
            })
            .fold(0.0, f64::max);
        if residual <= RESIDUAL_TOLERANCE || iterations >= MAX_ITERATIONS {
            if residual > RESIDUAL_TOLERANCE {
                log::debug!("subspace iteration stopped at residual {residual:.3e} after {iterations} iterations");
            }
            return Ok((vectors, values, iterations, residual));
        }
        x = orthonormalize(&y);
    }
}

fn normalize(
    mut ritz_vectors: DMatrix<f64>,
    ritz_values: Vec<f64>,
    iterations: usize,
    residual: f64,
    a: &Csr,
) -> SpectralFactors {
    let (n, dim) = ritz_vectors.shape();
    for c in 0..dim {
        let mut col = ritz_vectors.column_mut(c);
        // Rows without out-arcs are exactly zero in every left singular vector.
        for r in 0..n {
            if a.row_is_empty(r) {
                col[r] = 0.0;
            }
        }
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
        let pivot = (0..n).fold(0, |best, r| {
            if col[r].abs() > col[best].abs() {
                r
            } else {
                best
            }
        });
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
    }

    SpectralFactors {
        left: ritz_vectors,
        singular_values: ritz_values.iter().map(|l| l.sqrt()).collect(),
        iterations,
        residual,
    }
}

/// Rows of `U_d * diag(sqrt(sigma))` for the top-`dim` singular triplets.
pub fn spectral_embed(graph: &WeightedGraph, dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
    let f = spectral_factorize(graph, dim, seed)?;
    let n = graph.num_nodes;
    let scales: Vec<f64> = f.singular_values.iter().map(|s| s.sqrt()).collect();
    let data = (0..n)
        .flat_map(|r| {
            let left = &f.left;
            scales
                .iter()
                .enumerate()
                .map(move |(c, s)| left[(r, c)] * s)
        })
        .collect();
    EmbeddingMatrix::from_vec(n, dim, data)
}
