//! Reference oracles for the test suites.
//!
//! Everything here recomputes results through a different route than the
//! library under test: dense matrix products instead of strided amplitude
//! updates, compensated summation instead of plain folds, O(N²) threshold
//! scans instead of a single sorted sweep. Keep it that way — these oracles
//! are only useful while they stay independent.

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use qkad_core::statevector::{Circuit, Gate, Pauli};
use rand::Rng;

/// Dense 2^n × 2^n unitary (row-major) of a single gate, built elementwise
/// from the textbook matrix entries and the little-endian bit convention.
pub fn gate_unitary(gate: &Gate, n_qubits: usize) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let mut u = vec![Complex64::ZERO; dim * dim];
    match *gate {
        Gate::H { q } => {
            let f = std::f64::consts::FRAC_1_SQRT_2;
            let m = [
                [Complex64::new(f, 0.0), Complex64::new(f, 0.0)],
                [Complex64::new(f, 0.0), Complex64::new(-f, 0.0)],
            ];
            fill_single_qubit(&mut u, dim, q, &m);
        }
        Gate::Ry { q, theta } => {
            let (s, c) = (theta / 2.0).sin_cos();
            let m = [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ];
            fill_single_qubit(&mut u, dim, q, &m);
        }
        Gate::Rz { q, theta } => {
            let m = [
                [Complex64::from_polar(1.0, -theta / 2.0), Complex64::ZERO],
                [Complex64::ZERO, Complex64::from_polar(1.0, theta / 2.0)],
            ];
            fill_single_qubit(&mut u, dim, q, &m);
        }
        Gate::Zz { a, b, theta } => {
            for k in 0..dim {
                let bit_a = (k >> a) & 1;
                let bit_b = (k >> b) & 1;
                let sign = if bit_a == bit_b { 1.0 } else { -1.0 };
                u[k * dim + k] = Complex64::from_polar(1.0, -theta * sign);
            }
        }
        Gate::Cz { a, b } => {
            for k in 0..dim {
                let both = ((k >> a) & 1 == 1) && ((k >> b) & 1 == 1);
                u[k * dim + k] = if both {
                    -Complex64::ONE
                } else {
                    Complex64::ONE
                };
            }
        }
    }
    u
}

fn fill_single_qubit(u: &mut [Complex64], dim: usize, q: usize, m: &[[Complex64; 2]; 2]) {
    let mask = 1usize << q;
    for row in 0..dim {
        for col in 0..dim {
            if (row & !mask) == (col & !mask) {
                let rb = (row >> q) & 1;
                let cb = (col >> q) & 1;
                u[row * dim + col] = m[rb][cb];
            }
        }
    }
}

/// Dense unitary of a whole circuit (product of the gate matrices).
pub fn circuit_unitary(circuit: &Circuit) -> Vec<Complex64> {
    let dim = 1usize << circuit.n_qubits();
    let mut total = vec![Complex64::ZERO; dim * dim];
    for k in 0..dim {
        total[k * dim + k] = Complex64::ONE;
    }
    for gate in circuit.gates() {
        let g = gate_unitary(gate, circuit.n_qubits());
        total = mat_mul(&g, &total, dim);
    }
    total
}

fn mat_mul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == Complex64::ZERO {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// Applies a dense unitary to a state.
pub fn apply_unitary(u: &[Complex64], state: &[Complex64]) -> Vec<Complex64> {
    let dim = state.len();
    let mut out = vec![Complex64::ZERO; dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i] += u[i * dim + j] * state[j];
        }
    }
    out
}

/// Runs a circuit on |0…0⟩ through the dense-matrix route.
pub fn oracle_state(circuit: &Circuit) -> Vec<Complex64> {
    let dim = 1usize << circuit.n_qubits();
    let mut init = vec![Complex64::ZERO; dim];
    init[0] = Complex64::ONE;
    apply_unitary(&circuit_unitary(circuit), &init)
}

/// Reduced single-qubit density matrix of `qubit`, row-major 2×2.
pub fn reduced_density(state: &[Complex64], n_qubits: usize, qubit: usize) -> [Complex64; 4] {
    let dim = 1usize << n_qubits;
    let mask = 1usize << qubit;
    let mut rho = [Complex64::ZERO; 4];
    for k in 0..dim {
        for l in 0..dim {
            if (k & !mask) == (l & !mask) {
                let i = (k >> qubit) & 1;
                let j = (l >> qubit) & 1;
                rho[i * 2 + j] += state[k] * state[l].conj();
            }
        }
    }
    rho
}

/// tr(ρP) for a 2×2 density matrix.
pub fn pauli_trace(rho: &[Complex64; 4], pauli: Pauli) -> f64 {
    match pauli {
        Pauli::X => (rho[1] + rho[2]).re,
        Pauli::Y => (Complex64::i() * (rho[1] - rho[2])).re,
        Pauli::Z => (rho[0] - rho[3]).re,
    }
}

/// ⟨a|b⟩ using Kahan-compensated summation of the real and imaginary parts.
pub fn compensated_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut sum_re = 0.0f64;
    let mut sum_im = 0.0f64;
    let mut c_re = 0.0f64;
    let mut c_im = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let term = x.conj() * y;
        let t_re = term.re - c_re;
        let s_re = sum_re + t_re;
        c_re = (s_re - sum_re) - t_re;
        sum_re = s_re;
        let t_im = term.im - c_im;
        let s_im = sum_im + t_im;
        c_im = (s_im - sum_im) - t_im;
        sum_im = s_im;
    }
    Complex64::new(sum_re, sum_im)
}

/// Random circuit over the supported gate set. Two-qubit gates are only
/// drawn when the register has at least two qubits.
pub fn random_circuit<R: Rng>(n_qubits: usize, n_gates: usize, rng: &mut R) -> Circuit {
    let mut circuit = Circuit::new(n_qubits);
    for _ in 0..n_gates {
        let kinds = if n_qubits >= 2 { 5 } else { 3 };
        let q = rng.random_range(0..n_qubits);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let gate = match rng.random_range(0..kinds) {
            0 => Gate::H { q },
            1 => Gate::Rz { q, theta },
            2 => Gate::Ry { q, theta },
            kind => {
                let mut other = rng.random_range(0..n_qubits - 1);
                if other >= q {
                    other += 1;
                }
                if kind == 3 {
                    Gate::Zz {
                        a: q,
                        b: other,
                        theta,
                    }
                } else {
                    Gate::Cz { a: q, b: other }
                }
            }
        };
        circuit.push(gate).expect("generated gate must be valid");
    }
    circuit
}

/// Average precision recomputed by an O(N²) scan over every distinct
/// threshold, with precision and recall recounted from scratch each time.
pub fn brute_force_ap(scores: &[f64], labels: &[u8]) -> f64 {
    assert_eq!(scores.len(), labels.len());
    let positives = labels.iter().filter(|&&l| l == 1).count();
    assert!(positives > 0, "need at least one positive label");

    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();

    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for &t in &thresholds {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for (&s, &l) in scores.iter().zip(labels) {
            if s >= t {
                if l == 1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / positives as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    ap
}

/// PCA components and variances through the SVD route: centered data matrix
/// factored as X = UΣVᵀ, components = columns of V, variances = σ²/N.
/// Signs are normalized so the largest-magnitude entry of each component is
/// positive, matching the library convention.
pub fn svd_pca(x: ArrayView2<f64>) -> (Array2<f64>, Vec<f64>) {
    let (n, f) = (x.nrows(), x.ncols());
    let mut centered = DMatrix::zeros(n, f);
    for j in 0..f {
        let mean: f64 = x.column(j).iter().sum::<f64>() / n as f64;
        for i in 0..n {
            centered[(i, j)] = x[(i, j)] - mean;
        }
    }
    let svd = centered.svd(true, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut variances: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|s| s * s / n as f64)
        .collect();
    variances.resize(f, 0.0);

    let mut components = Array2::zeros((f, f));
    for comp in 0..v_t.nrows() {
        let mut col: Vec<f64> = (0..f).map(|j| v_t[(comp, j)]).collect();
        let max_idx = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if col[max_idx] < 0.0 {
            for v in &mut col {
                *v = -*v;
            }
        }
        for j in 0..f {
            components[(j, comp)] = col[j];
        }
    }
    (components, variances)
}
