//! Pairwise coordinate-ascent solver for the SVM duals (SMO with a
//! working set of two, first-order maximal-violating-pair selection).
//!
//! The problem solved is
//!
//! ```text
//! min_α  ½ αᵀQα + pᵀα    with Q_ij = y_i y_j K_ij
//! s.t.   Σ y_i α_i fixed by the initial point, 0 ≤ α_i ≤ U_i
//! ```
//!
//! which covers the C-SVC dual (y = labels, p = -1, α₀ = 0) and the
//! one-class dual (y = 1, p = 0, α₀ on the simplex). Convergence guarantees
//! assume a PSD kernel matrix; shot-sampled matrices may be slightly
//! indefinite, which the curvature floor tolerates but can slow down.

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Curvature floor for degenerate (or indefinite) pair subproblems.
const TAU: f64 = 1e-12;

pub(crate) struct SmoProblem<'a> {
    pub kernel: ArrayView2<'a, f64>,
    /// Labels in {-1, +1}.
    pub y: &'a [f64],
    /// Linear term of the objective.
    pub p: &'a [f64],
    /// Per-variable upper bounds.
    pub upper: &'a [f64],
    /// Stop when the maximal KKT violation drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Final maximal KKT violation (m − M).
    pub violation: f64,
    /// Gradient of the objective at the solution.
    pub gradient: Vec<f64>,
}

#[allow(clippy::needless_range_loop)]
impl<'a> SmoProblem<'a> {
    pub fn solve(&self, initial: Vec<f64>) -> Result<SmoSolution> {
        let n = self.y.len();
        debug_assert_eq!(self.kernel.nrows(), n);
        debug_assert_eq!(self.kernel.ncols(), n);
        debug_assert_eq!(self.p.len(), n);
        debug_assert_eq!(self.upper.len(), n);

        let mut alpha = initial;
        // g_i = Σ_j Q_ij α_j + p_i.
        let mut g: Vec<f64> = self.p.to_vec();
        for j in 0..n {
            if alpha[j] != 0.0 {
                let yj_aj = self.y[j] * alpha[j];
                for i in 0..n {
                    g[i] += self.y[i] * yj_aj * self.kernel[(i, j)];
                }
            }
        }

        let mut iterations = 0;
        let violation = loop {
            // Maximal violating pair: i maximizes -y g over the "up" set,
            // j minimizes -y g over the "down" set.
            let mut m = f64::NEG_INFINITY;
            let mut i_best = None;
            let mut big_m = f64::INFINITY;
            let mut j_best = None;
            for t in 0..n {
                let score = -self.y[t] * g[t];
                let can_up = (self.y[t] > 0.0 && alpha[t] < self.upper[t])
                    || (self.y[t] < 0.0 && alpha[t] > 0.0);
                let can_down = (self.y[t] > 0.0 && alpha[t] > 0.0)
                    || (self.y[t] < 0.0 && alpha[t] < self.upper[t]);
                if can_up && score > m {
                    m = score;
                    i_best = Some(t);
                }
                if can_down && score < big_m {
                    big_m = score;
                    j_best = Some(t);
                }
            }
            let (i, j) = match (i_best, j_best) {
                (Some(i), Some(j)) => (i, j),
                _ => break 0.0,
            };
            if m - big_m <= self.tol {
                break m - big_m;
            }
            if iterations >= self.max_iter {
                return Err(Error::NoConvergence(self.max_iter));
            }
            iterations += 1;

            let old_i = alpha[i];
            let old_j = alpha[j];
            let (ci, cj) = (self.upper[i], self.upper[j]);
            let quad =
                (self.kernel[(i, i)] + self.kernel[(j, j)] - 2.0 * self.kernel[(i, j)]).max(TAU);

            if self.y[i] != self.y[j] {
                let delta = (-g[i] - g[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > ci - cj {
                    if alpha[i] > ci {
                        alpha[i] = ci;
                        alpha[j] = ci - diff;
                    }
                } else if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = cj + diff;
                }
            } else {
                let delta = (g[i] - g[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > ci {
                    if alpha[i] > ci {
                        alpha[i] = ci;
                        alpha[j] = sum - ci;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > cj {
                    if alpha[j] > cj {
                        alpha[j] = cj;
                        alpha[i] = sum - cj;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }

            let delta_i = alpha[i] - old_i;
            let delta_j = alpha[j] - old_j;
            if delta_i == 0.0 && delta_j == 0.0 {
                // Numerically stuck pair; the violation can no longer be
                // reduced along this direction.
                break m - big_m;
            }
            for t in 0..n {
                g[t] += self.y[t]
                    * (self.y[i] * self.kernel[(t, i)] * delta_i
                        + self.y[j] * self.kernel[(t, j)] * delta_j);
            }
        };

        Ok(SmoSolution {
            alpha,
            violation,
            gradient: g,
        })
    }
}
