//! IQP embedding circuits with data re-uploading.
//!
//! One qubit uploads one feature. A single IQP layer is the twice-repeated
//! block `[H on all qubits; RZ(2ηx_i) on each qubit; ZZ(η²x_i x_j) on all
//! pairs i<j]`. The full embedding re-uploads the layer `depth` times with
//! fixed, seed-derived interleave circuits in between so adjacent uploads do
//! not cancel coherently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Circuit, Gate, Statevector};

/// Configuration of the embedding circuit. Identical configs produce
/// identical circuits for identical inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMapConfig {
    /// Register size; must equal the feature dimension.
    pub n_qubits: usize,
    /// Number of data uploads (d ≥ 1).
    pub depth: usize,
    /// Feature scaling prefactor applied before encoding.
    pub eta: f64,
    /// Seed for the fixed interleave circuits.
    pub interleave_seed: u64,
    /// RY+CZ layers per interleave block.
    pub interleave_layers: usize,
}

impl FeatureMapConfig {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            depth: 3,
            eta: 0.1,
            interleave_seed: 0,
            interleave_layers: 2,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_interleave_seed(mut self, seed: u64) -> Self {
        self.interleave_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidArgument("n_qubits must be ≥ 1".into()));
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument("depth must be ≥ 1".into()));
        }
        if self.eta <= 0.0 || !self.eta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "eta must be a positive finite number, got {}",
                self.eta
            )));
        }
        if self.interleave_layers == 0 {
            return Err(Error::InvalidArgument(
                "interleave_layers must be ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

fn check_features(x: &[f64], config: &FeatureMapConfig) -> Result<()> {
    config.validate()?;
    if x.len() != config.n_qubits {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: config.n_qubits,
        });
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite feature value {bad}"
        )));
    }
    Ok(())
}

/// One IQP layer for feature vector `x`.
pub fn build_iqp_layer(x: &[f64], config: &FeatureMapConfig) -> Result<Circuit> {
    check_features(x, config)?;
    let n = config.n_qubits;
    let scaled: Vec<f64> = x.iter().map(|v| v * config.eta).collect();
    let mut circuit = Circuit::new(n);
    for _ in 0..2 {
        for q in 0..n {
            circuit.push(Gate::H { q })?;
        }
        for (q, &s) in scaled.iter().enumerate() {
            circuit.push(Gate::Rz { q, theta: 2.0 * s })?;
        }
        for i in 0..n {
            for j in i + 1..n {
                circuit.push(Gate::Zz {
                    a: i,
                    b: j,
                    theta: scaled[i] * scaled[j],
                })?;
            }
        }
    }
    Ok(circuit)
}

// SplitMix64 finalizer; used to derive one independent angle per
// (seed, slot, layer, qubit) key without carrying RNG state around.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(h: u64, v: u64) -> u64 {
    splitmix64(h ^ v.wrapping_mul(0x2545_F491_4F6C_DD1D))
}

fn interleave_angle(seed: u64, slot: usize, layer: usize, qubit: usize) -> f64 {
    let mut h = splitmix64(seed);
    h = mix(h, slot as u64);
    h = mix(h, layer as u64);
    h = mix(h, qubit as u64);
    // Top 53 bits → uniform in [0, 1) → [0, 2π).
    ((h >> 11) as f64) * (1.0 / (1u64 << 53) as f64) * std::f64::consts::TAU
}

/// Data-independent interleave circuit for re-uploading slot `slot`
/// (1-based, between uploads `slot` and `slot+1`).
pub fn build_interleave(config: &FeatureMapConfig, slot: usize) -> Result<Circuit> {
    config.validate()?;
    if slot < 1 || slot > config.depth.saturating_sub(1) {
        return Err(Error::InvalidArgument(format!(
            "interleave slot {slot} out of range 1..={}",
            config.depth.saturating_sub(1)
        )));
    }
    let n = config.n_qubits;
    let mut circuit = Circuit::new(n);
    for layer in 0..config.interleave_layers {
        for q in 0..n {
            let theta = interleave_angle(config.interleave_seed, slot, layer, q);
            circuit.push(Gate::Ry { q, theta })?;
        }
        if n > 1 {
            for q in 0..n {
                circuit.push(Gate::Cz {
                    a: q,
                    b: (q + 1) % n,
                })?;
            }
        }
    }
    Ok(circuit)
}

/// Full embedding circuit: `depth` IQP uploads with interleaves in between.
pub fn build_embedding(x: &[f64], config: &FeatureMapConfig) -> Result<Circuit> {
    check_features(x, config)?;
    let iqp = build_iqp_layer(x, config)?;
    let mut circuit = Circuit::new(config.n_qubits);
    for upload in 0..config.depth {
        circuit.extend(&iqp)?;
        if upload + 1 < config.depth {
            circuit.extend(&build_interleave(config, upload + 1)?)?;
        }
    }
    Ok(circuit)
}

/// Embeds `x` into an `n_qubits`-qubit state: runs the embedding circuit on
/// `|0…0⟩`.
pub fn embed(x: &[f64], config: &FeatureMapConfig) -> Result<Statevector> {
    let circuit = build_embedding(x, config)?;
    let mut state = Statevector::zero(config.n_qubits)?;
    state.run_circuit(&circuit)?;
    Ok(state)
}
