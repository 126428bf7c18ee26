//! L2-regularized logistic regression on raw features, solved by damped
//! Newton iterations. The bias is unregularized.

use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GRAD_TOL: f64 = 1e-8;
const MAX_NEWTON_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    /// Infinity norm of the objective gradient at the solution.
    pub grad_norm: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z), stable for large |z|.
fn log1p_exp(z: f64) -> f64 {
    if z > 30.0 {
        z
    } else {
        z.exp().ln_1p()
    }
}

/// Training objective `½‖w‖² + C Σ ln(1 + exp(−ỹ_i (w·x_i + b)))` with
/// `ỹ = 2y − 1`. Exposed so an independent optimizer can cross-check the
/// solution.
pub fn logreg_objective(weights: &[f64], bias: f64, c: f64, x: ArrayView2<f64>, y: &[u8]) -> f64 {
    let reg: f64 = 0.5 * weights.iter().map(|w| w * w).sum::<f64>();
    let mut loss = 0.0;
    for (row, &label) in x.outer_iter().zip(y) {
        let f: f64 = row.iter().zip(weights).map(|(xi, wi)| xi * wi).sum::<f64>() + bias;
        let y_pm = 2.0 * label as f64 - 1.0;
        loss += log1p_exp(-y_pm * f);
    }
    reg + c * loss
}

/// Fits the model to first-order optimality `‖∇‖∞ ≤ 1e−6` (targets 1e−8).
pub fn train_logreg(x: ArrayView2<f64>, y: &[u8], c: f64) -> Result<LogRegModel> {
    let (n, f) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            left: y.len(),
            right: n,
        });
    }
    if n == 0 || f == 0 {
        return Err(Error::InvalidArgument("empty training data".into()));
    }
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "C must be a positive finite number, got {c}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite feature value".into()));
    }
    let positives = y.iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == n {
        return Err(Error::SingleClass);
    }

    // θ = (w, b); the Hessian block for b carries no identity term.
    let dim = f + 1;
    let mut theta = DVector::zeros(dim);
    let y_pm: Vec<f64> = y.iter().map(|&l| 2.0 * l as f64 - 1.0).collect();

    let objective = |theta: &DVector<f64>| -> f64 {
        logreg_objective(&theta.as_slice()[..f], theta[f], c, x, y)
    };

    let mut obj = objective(&theta);
    let mut grad_norm = f64::INFINITY;
    for _ in 0..MAX_NEWTON_ITER {
        // Gradient and Hessian at θ.
        let mut grad = DVector::zeros(dim);
        for j in 0..f {
            grad[j] = theta[j];
        }
        let mut hess = DMatrix::zeros(dim, dim);
        for j in 0..f {
            hess[(j, j)] = 1.0;
        }
        for (i, row) in x.outer_iter().enumerate() {
            let margin: f64 = row
                .iter()
                .zip(theta.iter())
                .map(|(xi, wi)| xi * wi)
                .sum::<f64>()
                + theta[f];
            let sig = sigmoid(-y_pm[i] * margin);
            let g_scale = -c * y_pm[i] * sig;
            let p = sigmoid(margin);
            let h_scale = c * p * (1.0 - p);
            for a in 0..f {
                grad[a] += g_scale * row[a];
                for b in a..f {
                    hess[(a, b)] += h_scale * row[a] * row[b];
                }
                hess[(a, f)] += h_scale * row[a];
            }
            grad[f] += g_scale;
            hess[(f, f)] += h_scale;
        }
        for a in 0..dim {
            for b in 0..a {
                hess[(a, b)] = hess[(b, a)];
            }
        }

        grad_norm = grad.amax();
        if grad_norm <= GRAD_TOL {
            break;
        }

        let step = match hess.clone().cholesky() {
            Some(chol) => chol.solve(&(-&grad)),
            // A vanishing curvature block (saturated sigmoids) can defeat
            // Cholesky; fall back to LU, then to a plain gradient step.
            None => match hess.lu().solve(&(-&grad)) {
                Some(s) => s,
                None => -&grad,
            },
        };

        // Backtracking line search on the objective.
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let candidate = &theta + t * &step;
            let cand_obj = objective(&candidate);
            if cand_obj <= obj {
                theta = candidate;
                obj = cand_obj;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }

    if grad_norm > 1e-6 {
        return Err(Error::NoConvergence(MAX_NEWTON_ITER));
    }

    Ok(LogRegModel {
        weights: theta.as_slice()[..f].to_vec(),
        bias: theta[f],
        c,
        grad_norm,
    })
}

impl LogRegModel {
    /// Fraud probability `σ(w·x + b)`, also used as the anomaly score.
    pub fn predict_scores(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.nrows() > 0 && x.ncols() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                left: x.ncols(),
                right: self.weights.len(),
            });
        }
        Ok(x.outer_iter()
            .map(|row| {
                let f: f64 = row
                    .iter()
                    .zip(&self.weights)
                    .map(|(xi, wi)| xi * wi)
                    .sum::<f64>()
                    + self.bias;
                sigmoid(f)
            })
            .collect())
    }
}
