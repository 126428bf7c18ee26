//! Dense statevector simulation of n-qubit pure states.
//!
//! The basis is little-endian: qubit `q` addresses bit `q` of the basis
//! index, so `|b_{n-1} … b_1 b_0⟩` lives at index `Σ b_q 2^q`. Gate
//! conventions:
//!
//! * `H  = (1/√2) [[1, 1], [1, -1]]`
//! * `RZ(θ) = exp(-iθZ/2) = diag(e^{-iθ/2}, e^{+iθ/2})`
//! * `RY(θ) = exp(-iθY/2) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`
//! * `ZZ(θ) = exp(-iθ Z⊗Z)` (diagonal phase `e^{-iθ}` on equal bits,
//!   `e^{+iθ}` on unequal bits)
//! * `CZ = diag(1, 1, 1, -1)`

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the register size accepted by [`Statevector::zero`].
/// 2^24 amplitudes is 256 MiB of complex doubles.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// A single gate from the set needed by the feature maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    H { q: usize },
    Rz { q: usize, theta: f64 },
    Ry { q: usize, theta: f64 },
    Zz { a: usize, b: usize, theta: f64 },
    Cz { a: usize, b: usize },
}

impl Gate {
    /// Highest qubit index touched by the gate.
    pub fn max_target(&self) -> usize {
        match *self {
            Gate::H { q } | Gate::Rz { q, .. } | Gate::Ry { q, .. } => q,
            Gate::Zz { a, b, .. } | Gate::Cz { a, b } => a.max(b),
        }
    }

    /// Rotation angle, if the gate has one.
    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz { theta, .. } | Gate::Ry { theta, .. } | Gate::Zz { theta, .. } => Some(theta),
            Gate::H { .. } | Gate::Cz { .. } => None,
        }
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::H { q } => Gate::H { q },
            Gate::Cz { a, b } => Gate::Cz { a, b },
            Gate::Rz { q, theta } => Gate::Rz { q, theta: -theta },
            Gate::Ry { q, theta } => Gate::Ry { q, theta: -theta },
            Gate::Zz { a, b, theta } => Gate::Zz {
                a,
                b,
                theta: -theta,
            },
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if let Some(theta) = self.angle() {
            if !theta.is_finite() {
                return Err(Error::InvalidGate(format!("non-finite angle {theta}")));
            }
        }
        if let Gate::Zz { a, b, .. } | Gate::Cz { a, b } = *self {
            if a == b {
                return Err(Error::InvalidGate(format!(
                    "two-qubit gate targets must be distinct, got ({a}, {b})"
                )));
            }
        }
        let index = self.max_target();
        if index >= n_qubits {
            return Err(Error::QubitIndex { index, n_qubits });
        }
        Ok(())
    }
}

/// An ordered gate list acting on a fixed register size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut circuit = Self::new(n_qubits);
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate after validating its targets against the register.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other`, which must act on the same register size.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Inverse circuit: gates reversed, angles negated.
    pub fn inverted(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }
}

/// Local Pauli observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n` qubits, subject to [`DEFAULT_QUBIT_CAP`].
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_cap(n, DEFAULT_QUBIT_CAP)
    }

    /// `|0…0⟩` with an explicit cap on the register size.
    pub fn zero_with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "qubit count must be at least 1".into(),
            ));
        }
        if n > cap {
            return Err(Error::QubitCapExceeded { requested: n, cap });
        }
        let mut amplitudes = vec![Complex64::ZERO; 1 << n];
        amplitudes[0] = Complex64::ONE;
        Ok(Self {
            n_qubits: n,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes; they must already be normalized.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: 1 << n,
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "amplitudes are not normalized (Σ|a|² = {norm_sqr})"
            )));
        }
        Ok(Self {
            n_qubits: n,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, index: usize) -> Result<()> {
        if index >= self.n_qubits {
            return Err(Error::QubitIndex {
                index,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Applies one gate in place.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::H { q } => self.apply_hadamard(q),
            Gate::Ry { q, theta } => self.apply_ry(q, theta),
            Gate::Rz { q, theta } => self.apply_rz(q, theta),
            Gate::Zz { a, b, theta } => self.apply_zz(a, b, theta),
            Gate::Cz { a, b } => self.apply_cz(a, b),
        }
        Ok(())
    }

    /// Applies all gates of `circuit` in order.
    pub fn run_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: circuit.n_qubits(),
            });
        }
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    fn apply_hadamard(&mut self, q: usize) {
        const FRAC: f64 = std::f64::consts::FRAC_1_SQRT_2;
        self.for_each_pair(q, |lo, hi| (FRAC * (lo + hi), FRAC * (lo - hi)));
    }

    fn apply_ry(&mut self, q: usize, theta: f64) {
        let (sin, cos) = (theta / 2.0).sin_cos();
        self.for_each_pair(q, |lo, hi| (cos * lo - sin * hi, sin * lo + cos * hi));
    }

    fn apply_rz(&mut self, q: usize, theta: f64) {
        let phase_lo = Complex64::from_polar(1.0, -theta / 2.0);
        let phase_hi = Complex64::from_polar(1.0, theta / 2.0);
        let mask = 1usize << q;
        for (k, amp) in self.amplitudes.iter_mut().enumerate() {
            *amp *= if k & mask == 0 { phase_lo } else { phase_hi };
        }
    }

    fn apply_zz(&mut self, a: usize, b: usize, theta: f64) {
        // Diagonal pass: e^{-iθ} when the two bits agree, e^{+iθ} otherwise.
        let phase_eq = Complex64::from_polar(1.0, -theta);
        let phase_ne = Complex64::from_polar(1.0, theta);
        let mask_a = 1usize << a;
        let mask_b = 1usize << b;
        for (k, amp) in self.amplitudes.iter_mut().enumerate() {
            let equal = ((k & mask_a) == 0) == ((k & mask_b) == 0);
            *amp *= if equal { phase_eq } else { phase_ne };
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (k, amp) in self.amplitudes.iter_mut().enumerate() {
            if k & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// Visits every (bit q = 0, bit q = 1) amplitude pair once.
    fn for_each_pair<F>(&mut self, q: usize, f: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let step = 1usize << q;
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for lo_idx in base..base + step {
                let hi_idx = lo_idx + step;
                let (lo, hi) = (self.amplitudes[lo_idx], self.amplitudes[hi_idx]);
                let (new_lo, new_hi) = f(lo, hi);
                self.amplitudes[lo_idx] = new_lo;
                self.amplitudes[hi_idx] = new_hi;
            }
            base += 2 * step;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Expectation value of a single-qubit Pauli operator.
    pub fn pauli_expectation(&self, pauli: Pauli, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let step = 1usize << qubit;
        let dim = self.amplitudes.len();
        let mut acc = 0.0;
        let mut base = 0;
        while base < dim {
            for lo_idx in base..base + step {
                let lo = self.amplitudes[lo_idx];
                let hi = self.amplitudes[lo_idx + step];
                acc += match pauli {
                    Pauli::X => 2.0 * (lo.conj() * hi).re,
                    Pauli::Y => 2.0 * (lo.conj() * hi).im,
                    Pauli::Z => lo.norm_sqr() - hi.norm_sqr(),
                };
            }
            base += 2 * step;
        }
        Ok(acc)
    }
}
