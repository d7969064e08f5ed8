//! L2-regularized logistic regression fitted by damped Newton steps.
//!
//! Objective: `sum_i [log(1 + e^{z_i}) - y_i z_i] + (reg / 2) ||w||^2` with
//! `z_i = w . x_i + b`; the bias is not penalized.
//!
//! By default the training features are centred per column and divided by one
//! common scale before fitting, and the fitted coefficients are mapped back,
//! so the returned model scores raw features. Spectral embeddings of
//! walk-count graphs can reach 1e15 in magnitude, where an unscaled penalty
//! and gradient tolerance are meaningless. A common scale keeps the relative
//! size of the columns, which for spectral embeddings encodes how strong each
//! direction is.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    /// L2 coefficient; larger means stronger shrinkage.
    pub reg_strength: f64,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Fit on centred features divided by their overall root mean square.
    /// Weights, loss history and tolerance then refer to the scaled problem.
    pub standardize: bool,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            reg_strength: 1.0,
            tol: 1e-4,
            max_iter: 1000,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value before the first step and after every step.
    pub loss_history: Vec<f64>,
}

impl LogisticModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn design(features: &[Vec<f64>]) -> DMatrix<f64> {
    let p = features.first().map_or(0, Vec::len);
    DMatrix::from_fn(features.len(), p, |r, c| features[r][c])
}

/// Centres every column in place, then divides all of them by the root mean
/// square of the centred entries. Returns the column means and the per-column
/// scale (the same value for every column).
fn standardize(x: &mut DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = x.nrows() as f64;
    let center: Vec<f64> = x.column_iter().map(|col| col.sum() / n).collect();
    for (mut col, &mean) in x.column_iter_mut().zip(&center) {
        col.add_scalar_mut(-mean);
    }
    let rms = (x.norm_squared() / x.len().max(1) as f64).sqrt();
    let scale = if rms > 0.0 && rms.is_finite() {
        rms
    } else {
        1.0
    };
    *x /= scale;
    (center, vec![scale; x.ncols()])
}

fn loss_at(x: &DMatrix<f64>, y: &DVector<f64>, w: &DVector<f64>, b: f64, reg: f64) -> f64 {
    let z = x * w;
    z.iter()
        .zip(y.iter())
        .map(|(&zi, &yi)| softplus(zi + b) - yi * (zi + b))
        .sum::<f64>()
        + 0.5 * reg * w.norm_squared()
}

/// Objective value and gradient `(d/dw, d/db)` at `(weights, bias)`.
pub fn logistic_objective(
    features: &[Vec<f64>],
    labels: &[bool],
    weights: &[f64],
    bias: f64,
    reg_strength: f64,
) -> (f64, Vec<f64>, f64) {
    let x = design(features);
    let y = DVector::from_iterator(labels.len(), labels.iter().map(|&l| f64::from(u8::from(l))));
    let w = DVector::from_column_slice(weights);
    let (loss, gw, gb) = objective(&x, &y, &w, bias, reg_strength);
    (loss, gw.iter().copied().collect(), gb)
}

fn objective(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &DVector<f64>,
    b: f64,
    reg: f64,
) -> (f64, DVector<f64>, f64) {
    let z = x * w;
    let mut loss = 0.5 * reg * w.norm_squared();
    let mut residual = DVector::zeros(y.len());
    for i in 0..y.len() {
        let zi = z[i] + b;
        loss += softplus(zi) - y[i] * zi;
        residual[i] = sigmoid(zi) - y[i];
    }
    let gw = x.transpose() * &residual + w * reg;
    (loss, gw, residual.sum())
}

pub fn train_logistic(
    features: &[Vec<f64>],
    labels: &[bool],
    params: &LogisticParams,
) -> Result<LogisticModel> {
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} examples for {} labels",
            features.len(),
            labels.len()
        )));
    }
    if !(labels.contains(&true) && labels.contains(&false)) {
        return Err(Error::SingleClass);
    }
    let p = features[0].len();
    if let Some(k) = features.iter().position(|f| f.len() != p) {
        return Err(Error::DimensionMismatch(format!(
            "example {k} has {} features, expected {p}",
            features[k].len()
        )));
    }
    if let Some(k) = features
        .iter()
        .position(|f| f.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NonFinite(k));
    }
    if !(params.reg_strength >= 0.0 && params.tol > 0.0) {
        return Err(Error::InvalidParameter(
            "reg_strength must be >= 0 and tol > 0".into(),
        ));
    }

    let mut x = design(features);
    let (center, scale) = if params.standardize {
        standardize(&mut x)
    } else {
        (vec![0.0; p], vec![1.0; p])
    };
    let y = DVector::from_iterator(labels.len(), labels.iter().map(|&l| f64::from(u8::from(l))));
    let reg = params.reg_strength;
    let mut w = DVector::zeros(p);
    let mut b = 0.0;
    let (mut loss, mut gw, mut gb) = objective(&x, &y, &w, b, reg);
    let mut history = vec![loss];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < params.max_iter {
        let grad_norm = (gw.norm_squared() + gb * gb).sqrt();
        if grad_norm < params.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (dw, db) = newton_direction(&x, &w, b, reg, &gw, gb).unwrap_or_else(|| (-&gw, -gb));
        let slope = gw.dot(&dw) + gb * db;
        let (dw, db, slope) = if slope < 0.0 {
            (dw, db, slope)
        } else {
            (-&gw, -gb, -grad_norm * grad_norm)
        };

        // Armijo backtracking keeps the objective monotone.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand_w = &w + &dw * step;
            let cand_b = b + db * step;
            let cand = loss_at(&x, &y, &cand_w, cand_b, reg);
            if cand <= loss + 1e-4 * step * slope {
                accepted = Some((cand_w, cand_b));
                break;
            }
            step *= 0.5;
        }
        let Some((nw, nb)) = accepted else {
            log::debug!("line search stalled at gradient norm {grad_norm:.3e}");
            break;
        };
        w = nw;
        b = nb;
        (loss, gw, gb) = objective(&x, &y, &w, b, reg);
        history.push(loss);
    }
    if !converged {
        let grad_norm = (gw.norm_squared() + gb * gb).sqrt();
        converged = grad_norm < params.tol;
    }

    let weights: Vec<f64> = w.iter().zip(&scale).map(|(wk, sk)| wk / sk).collect();
    let bias = b - weights
        .iter()
        .zip(&center)
        .map(|(wk, ck)| wk * ck)
        .sum::<f64>();
    Ok(LogisticModel {
        weights,
        bias,
        iterations,
        converged,
        loss_history: history,
    })
}

/// Solves `H d = -g` for the augmented parameter vector `[w; b]`.
fn newton_direction(
    x: &DMatrix<f64>,
    w: &DVector<f64>,
    b: f64,
    reg: f64,
    gw: &DVector<f64>,
    gb: f64,
) -> Option<(DVector<f64>, f64)> {
    let (n, p) = x.shape();
    let z = x * w;
    let d = DVector::from_iterator(
        n,
        z.iter().map(|&zi| {
            let s = sigmoid(zi + b);
            s * (1.0 - s)
        }),
    );
    let mut xa = DMatrix::zeros(n, p + 1);
    xa.view_mut((0, 0), (n, p)).copy_from(x);
    xa.column_mut(p).fill(1.0);
    let mut weighted = xa.clone();
    for (r, &dr) in d.iter().enumerate() {
        weighted.row_mut(r).scale_mut(dr);
    }
    let mut h = xa.transpose() * weighted;
    for k in 0..p {
        h[(k, k)] += reg;
    }
    h[(p, p)] += 1e-10;
    let mut g = DVector::zeros(p + 1);
    g.rows_mut(0, p).copy_from(gw);
    g[p] = gb;
    let sol = h.cholesky()?.solve(&(-g));
    Some((sol.rows(0, p).into_owned(), sol[p]))
}
