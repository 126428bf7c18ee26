//! One-class SVM in the ν-parameterized form: dual coefficients live on the
//! simplex `Σ α_i = 1` with box `0 ≤ α_i ≤ 1/(ν N)`. Negative decision
//! values flag anomalies; the ranking score is the negated decision so that
//! higher means more anomalous.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::smo::SmoProblem;
use crate::error::{Error, Result};
use crate::gram::GramMatrix;

/// Maximal KKT violation accepted at the solution.
pub const OCSVM_TOL: f64 = 1e-3;
const MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcSvmModel {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub nu: f64,
    pub support_idx: Vec<usize>,
    pub kkt_residual: f64,
}

/// Trains on nominal rows only: minimize `½ ΣΣ α_iα_j K_ij` subject to
/// `0 ≤ α_i ≤ 1/(νN)`, `Σ α_i = 1`. The offset ρ is the decision value of
/// free support vectors, averaged; with no free vector it is the midpoint
/// of the interval the KKT conditions admit.
pub fn train_ocsvm(k: &GramMatrix, nu: f64) -> Result<OcSvmModel> {
    train_ocsvm_with_tol(k, nu, OCSVM_TOL)
}

/// [`train_ocsvm`] with an explicit KKT stopping tolerance. Free support
/// vectors score zero to within the tolerance, so callers needing tighter
/// KKT residuals can request one.
pub fn train_ocsvm_with_tol(k: &GramMatrix, nu: f64, tol: f64) -> Result<OcSvmModel> {
    let n = k.n_samples();
    if nu.is_nan() || nu <= 0.0 || nu > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "nu must lie in (0, 1], got {nu}"
        )));
    }
    if nu * (n as f64) < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "infeasible bound: nu·N = {} < 1",
            nu * n as f64
        )));
    }

    let bound = 1.0 / (nu * n as f64);
    let y = vec![1.0; n];
    let p = vec![0.0; n];
    let upper = vec![bound; n];

    // Feasible start: fill ⌊νN⌋ coefficients at the bound, put the
    // remainder of the unit mass on the next one.
    let mut alpha = vec![0.0; n];
    let full = (nu * n as f64).floor() as usize;
    let mut remaining = 1.0;
    for a in alpha.iter_mut().take(full.min(n)) {
        *a = bound;
        remaining -= bound;
    }
    if remaining > 0.0 && full < n {
        alpha[full] = remaining.min(bound);
    }

    let problem = SmoProblem {
        kernel: k.values.view(),
        y: &y,
        p: &p,
        upper: &upper,
        tol,
        max_iter: MAX_ITER,
    };
    let solution = problem.solve(alpha)?;

    // g_i = (Kα)_i is the decision value without offset.
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper_bound = f64::INFINITY;
    for i in 0..n {
        let g = solution.gradient[i];
        if solution.alpha[i] >= bound {
            lower = lower.max(g);
        } else if solution.alpha[i] <= 0.0 {
            upper_bound = upper_bound.min(g);
        } else {
            n_free += 1;
            sum_free += g;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        match (lower.is_finite(), upper_bound.is_finite()) {
            (true, true) => (lower + upper_bound) / 2.0,
            (true, false) => lower,
            (false, true) => upper_bound,
            (false, false) => 0.0,
        }
    };

    let alpha_sum: f64 = solution.alpha.iter().sum();
    debug_assert!((alpha_sum - 1.0).abs() <= 1e-8, "Σα = {alpha_sum}");

    let support_idx: Vec<usize> = (0..n).filter(|&i| solution.alpha[i] > 0.0).collect();

    Ok(OcSvmModel {
        alpha: solution.alpha,
        rho,
        nu,
        support_idx,
        kkt_residual: solution.violation,
    })
}

impl OcSvmModel {
    /// Decision value `Σ α_i κ(x_i, x) − ρ`; negative means anomalous.
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
            .zip(k_row)
            .map(|(a, k)| a * k)
            .sum::<f64>()
            - self.rho)
    }

    /// Anomaly scores: negated decision values, higher = more anomalous.
    pub fn predict_scores(&self, k_cross: ArrayView2<f64>) -> Result<Vec<f64>> {
        k_cross
            .outer_iter()
            .map(|row| {
                self.decision(row.as_slice().expect("contiguous row"))
                    .map(|f| -f)
            })
            .collect()
    }
}
