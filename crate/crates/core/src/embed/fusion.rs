use serde::{Deserialize, Serialize};

use super::EmbeddingMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    /// Row-wise concatenation in time order.
    Concat,
    /// Exponential smoothing `Zbar_t = (1 - theta) Zbar_{t-1} + theta Z_t`.
    Smooth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionParams {
    pub mode: FusionMode,
    pub theta: f64,
    /// Explicit per-snapshot widths for concatenation, oldest first.
    pub dims_per_snapshot: Option<Vec<usize>>,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            mode: FusionMode::Smooth,
            theta: 0.8,
            dims_per_snapshot: None,
        }
    }
}

impl FusionParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// Embedding width of each of `t` snapshots so the fused result is
    /// `total_dim` wide.
    pub fn snapshot_dims(&self, t: usize, total_dim: usize) -> Result<Vec<usize>> {
        match (self.mode, &self.dims_per_snapshot) {
            (FusionMode::Smooth, _) => Ok(vec![total_dim; t]),
            (FusionMode::Concat, None) => Ok(concat_allocation(t, total_dim)),
            (FusionMode::Concat, Some(dims)) => {
                if dims.len() != t || dims.iter().sum::<usize>() != total_dim {
                    return Err(Error::DimensionMismatch(format!(
                        "allocation {dims:?} does not split {total_dim} over {t} snapshots"
                    )));
                }
                Ok(dims.clone())
            }
        }
    }
}

/// `floor(total / t)` per snapshot; the remainder goes to the most recent one.
pub fn concat_allocation(t: usize, total_dim: usize) -> Vec<usize> {
    if t == 0 {
        return Vec::new();
    }
    let mut dims = vec![total_dim / t; t];
    dims[t - 1] += total_dim % t;
    dims
}

/// `[Z_1 Z_2 ... Z_T]`; widths must add up to `total_dim`.
pub fn fuse_concat(mats: &[EmbeddingMatrix], total_dim: usize) -> Result<EmbeddingMatrix> {
    let first = mats
        .first()
        .ok_or_else(|| Error::Empty("no embeddings to concatenate".into()))?;
    let rows = first.rows();
    if let Some(m) = mats.iter().find(|m| m.rows() != rows) {
        return Err(Error::DimensionMismatch(format!(
            "row counts {rows} and {}",
            m.rows()
        )));
    }
    let width: usize = mats.iter().map(EmbeddingMatrix::dim).sum();
    if width != total_dim {
        return Err(Error::DimensionMismatch(format!(
            "snapshot widths sum to {width}, expected {total_dim}"
        )));
    }
    let mut data = Vec::with_capacity(rows * width);
    for r in 0..rows {
        for m in mats {
            data.extend_from_slice(m.row(r));
        }
    }
    EmbeddingMatrix::from_vec(rows, width, data)
}

/// Runs the smoothing recurrence from `Zbar_0 = 0` and returns `Zbar_T`.
pub fn fuse_smooth(mats: &[EmbeddingMatrix], theta: f64) -> Result<EmbeddingMatrix> {
    let first = mats
        .first()
        .ok_or_else(|| Error::Empty("no embeddings to fuse".into()))?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    if let Some(m) = mats
        .iter()
        .find(|m| (m.rows(), m.dim()) != (first.rows(), first.dim()))
    {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{}",
            first.rows(),
            first.dim(),
            m.rows(),
            m.dim()
        )));
    }
    if theta == 0.0 {
        log::warn!("theta = 0 discards every snapshot; the fused embedding is all zeros");
    }
    let mut acc = EmbeddingMatrix::zeros(first.rows(), first.dim());
    for z in mats {
        acc.scale_add(1.0 - theta, z, theta);
    }
    Ok(acc)
}

/// Fuses with the configured mode. Concatenation expects widths from
/// [`FusionParams::snapshot_dims`].
pub fn fuse(mats: &[EmbeddingMatrix], params: &FusionParams) -> Result<EmbeddingMatrix> {
    params.validate()?;
    match params.mode {
        FusionMode::Concat => fuse_concat(mats, mats.iter().map(EmbeddingMatrix::dim).sum()),
        FusionMode::Smooth => fuse_smooth(mats, params.theta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn filled(rows: usize, dim: usize, v: f64) -> EmbeddingMatrix {
        EmbeddingMatrix::from_vec(rows, dim, vec![v; rows * dim]).unwrap()
    }

    fn seq(rows: usize, dim: usize, offset: f64) -> EmbeddingMatrix {
        EmbeddingMatrix::from_vec(
            rows,
            dim,
            (0..rows * dim).map(|k| k as f64 + offset).collect(),
        )
        .unwrap()
    }

    #[test]
    fn concat_widths() {
        let out = fuse_concat(&[filled(3, 64, 1.0), filled(3, 64, 2.0)], 128).unwrap();
        assert_eq!(out.dim(), 128);
        assert_eq!(out.get(2, 63), 1.0);
        assert_eq!(out.get(2, 64), 2.0);

        let single = seq(4, 5, 0.0);
        assert_eq!(
            fuse_concat(std::slice::from_ref(&single), 5).unwrap(),
            single
        );

        let skewed = fuse_concat(&[filled(2, 32, 1.0), filled(2, 96, 2.0)], 128).unwrap();
        assert_eq!(skewed.dim(), 128);
        assert!(fuse_concat(&[filled(2, 32, 1.0)], 128).is_err());
        assert!(fuse_concat(&[filled(2, 2, 1.0), filled(3, 2, 1.0)], 4).is_err());
    }

    #[test]
    fn default_allocation_gives_remainder_to_latest() {
        assert_eq!(concat_allocation(2, 128), vec![64, 64]);
        assert_eq!(concat_allocation(6, 128), vec![21, 21, 21, 21, 21, 23]);
        assert_eq!(concat_allocation(7, 128).iter().sum::<usize>(), 128);
        let p = FusionParams {
            mode: FusionMode::Concat,
            theta: 0.8,
            dims_per_snapshot: Some(vec![32, 96]),
        };
        assert_eq!(p.snapshot_dims(2, 128).unwrap(), vec![32, 96]);
        assert!(p.snapshot_dims(3, 128).is_err());
    }

    #[test]
    fn smooth_examples() {
        let z1 = seq(3, 2, 1.0);
        let z2 = seq(3, 2, 10.0);
        assert_eq!(fuse_smooth(&[z1.clone(), z2.clone()], 1.0).unwrap(), z2);

        let once = fuse_smooth(&[filled(2, 3, 1.0)], 0.8).unwrap();
        assert!(once.as_slice().iter().all(|&v| v == 0.8));

        let two = fuse_smooth(&[z1.clone(), z2.clone()], 0.5).unwrap();
        for k in 0..6 {
            let want = 0.25 * z1.as_slice()[k] + 0.5 * z2.as_slice()[k];
            assert!((two.as_slice()[k] - want).abs() < 1e-12);
        }

        let zero = fuse_smooth(&[z1, z2], 0.0).unwrap();
        assert!(zero.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn smooth_errors() {
        assert!(fuse_smooth(&[], 0.5).is_err());
        assert!(fuse_smooth(&[filled(2, 2, 1.0)], 1.5).is_err());
        assert!(fuse_smooth(&[filled(2, 2, 1.0), filled(2, 3, 1.0)], 0.5).is_err());
    }

    proptest! {
        #[test]
        fn smooth_matches_closed_form(
            theta in 0.0f64..=1.0,
            values in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 1..8),
        ) {
            let mats: Vec<_> = values.iter().map(|v| EmbeddingMatrix::from_vec(3, 2, v.clone()).unwrap()).collect();
            let fused = fuse_smooth(&mats, theta).unwrap();
            let t = mats.len();
            for k in 0..6 {
                let closed: f64 = mats
                    .iter()
                    .enumerate()
                    .map(|(p, m)| theta * (1.0 - theta).powi((t - 1 - p) as i32) * m.as_slice()[k])
                    .sum();
                prop_assert!((fused.as_slice()[k] - closed).abs() < 1e-12);
            }
        }

        #[test]
        fn fusion_commutes_with_row_permutation(shift in 1usize..5, theta in 0.1f64..1.0) {
            let mats = vec![seq(5, 3, 0.5), seq(5, 3, -2.0), seq(5, 3, 7.0)];
            let perm = |m: &EmbeddingMatrix| {
                let mut data = vec![0.0; 15];
                for r in 0..5 {
                    data[((r + shift) % 5) * 3..][..3].copy_from_slice(m.row(r));
                }
                EmbeddingMatrix::from_vec(5, 3, data).unwrap()
            };
            let permuted: Vec<_> = mats.iter().map(perm).collect();
            prop_assert_eq!(perm(&fuse_smooth(&mats, theta).unwrap()), fuse_smooth(&permuted, theta).unwrap());
            let concat = fuse_concat(&mats, 9).unwrap();
            let concat_p = fuse_concat(&permuted, 9).unwrap();
            for r in 0..5 {
                prop_assert_eq!(concat.row(r), concat_p.row((r + shift) % 5));
            }
        }
    }
}
