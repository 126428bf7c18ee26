//! C-support-vector classification from a precomputed Gram matrix.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::smo::SmoProblem;
use crate::error::{Error, Result};
use crate::gram::GramMatrix;

/// Maximal KKT violation accepted at the solution.
pub const SVC_TOL: f64 = 1e-3;
const MAX_ITER: usize = 1_000_000;

/// Trained C-SVC. The labels are stored separately from the dual
/// coefficients, so the decision function is `Σ α_i y_i κ(x_i, x) + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvcModel {
    pub alpha: Vec<f64>,
    pub labels: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    pub support_idx: Vec<usize>,
    pub kkt_residual: f64,
}

/// Solves the standard dual: maximize `Σα_i − ½ ΣΣ α_iα_j y_iy_j K_ij`
/// subject to `0 ≤ α_i ≤ C`, `Σ α_i y_i = 0`. The bias is averaged over
/// free support vectors.
pub fn train_svc(k: &GramMatrix, y: &[f64], c: f64) -> Result<SvcModel> {
    train_svc_with_tol(k, y, c, SVC_TOL)
}

/// [`train_svc`] with an explicit KKT stopping tolerance.
pub fn train_svc_with_tol(k: &GramMatrix, y: &[f64], c: f64, tol: f64) -> Result<SvcModel> {
    let n = k.n_samples();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            left: y.len(),
            right: n,
        });
    }
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "C must be a positive finite number, got {c}"
        )));
    }
    if let Some(bad) = y.iter().find(|v| v.abs() != 1.0) {
        return Err(Error::InvalidArgument(format!(
            "labels must be ±1, got {bad}"
        )));
    }
    if y.iter().all(|&v| v > 0.0) || y.iter().all(|&v| v < 0.0) {
        return Err(Error::SingleClass);
    }

    let p = vec![-1.0; n];
    let upper = vec![c; n];
    let problem = SmoProblem {
        kernel: k.values.view(),
        y,
        p: &p,
        upper: &upper,
        tol,
        max_iter: MAX_ITER,
    };
    let solution = problem.solve(vec![0.0; n])?;

    // Bias from the KKT conditions: free support vectors give it exactly;
    // otherwise take the midpoint of the admissible interval.
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    for i in 0..n {
        let yg = y[i] * solution.gradient[i];
        if solution.alpha[i] >= upper[i] {
            if y[i] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if solution.alpha[i] <= 0.0 {
            if y[i] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    let bias = -rho;

    let support_idx: Vec<usize> = (0..n).filter(|&i| solution.alpha[i] > 0.0).collect();
    debug_assert!(
        solution
            .alpha
            .iter()
            .zip(y)
            .map(|(a, yi)| a * yi)
            .sum::<f64>()
            .abs()
            <= 1e-6 * c * n as f64
    );

    Ok(SvcModel {
        alpha: solution.alpha,
        labels: y.to_vec(),
        bias,
        c,
        support_idx,
        kkt_residual: solution.violation,
    })
}

impl SvcModel {
    /// Decision value for one query given its kernel row against the
    /// training set.
    pub fn decision(&self, k_row: &[f64]) -> Result<f64> {
        if k_row.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                left: k_row.len(),
                right: self.alpha.len(),
            });
        }
        Ok(self
            .alpha
            .iter()
            .zip(&self.labels)
            .zip(k_row)
            .map(|((a, y), k)| a * y * k)
            .sum::<f64>()
            + self.bias)
    }

    /// Anomaly scores: the decision margin of the +1 (fraud) class.
    pub fn predict_scores(&self, k_cross: ArrayView2<f64>) -> Result<Vec<f64>> {
        k_cross
            .outer_iter()
            .map(|row| self.decision(row.as_slice().expect("contiguous row")))
            .collect()
    }
}
