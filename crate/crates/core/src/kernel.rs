//! Pointwise kernel evaluation: classical RBF, quantum fidelity, projected
//! quantum kernel, and the finite-shot estimator for return probabilities.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featuremap::{self, FeatureMapConfig};
use crate::statevector::{Pauli, Statevector};

/// Which kernel function to evaluate. The quantum kinds carry their feature
/// map; `gamma` only exists where the kernel uses it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Rbf { gamma: f64 },
    Fidelity { map: FeatureMapConfig },
    Projected { map: FeatureMapConfig, gamma: f64 },
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Rbf { .. } => "rbf",
            KernelKind::Fidelity { .. } => "fidelity",
            KernelKind::Projected { .. } => "projected",
        }
    }

    pub fn feature_map(&self) -> Option<&FeatureMapConfig> {
        match self {
            KernelKind::Rbf { .. } => None,
            KernelKind::Fidelity { map } | KernelKind::Projected { map, .. } => Some(map),
        }
    }
}

/// Shot budget for kernel estimation; `Exact` reads the simulated value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotBudget {
    Exact,
    Shots(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub shots: ShotBudget,
    pub shot_seed: u64,
}

impl KernelConfig {
    pub fn rbf(gamma: f64) -> Self {
        Self {
            kind: KernelKind::Rbf { gamma },
            shots: ShotBudget::Exact,
            shot_seed: 0,
        }
    }

    pub fn fidelity(map: FeatureMapConfig) -> Self {
        Self {
            kind: KernelKind::Fidelity { map },
            shots: ShotBudget::Exact,
            shot_seed: 0,
        }
    }

    pub fn projected(map: FeatureMapConfig, gamma: f64) -> Self {
        Self {
            kind: KernelKind::Projected { map, gamma },
            shots: ShotBudget::Exact,
            shot_seed: 0,
        }
    }

    pub fn with_shots(mut self, shots: u64, seed: u64) -> Result<Self> {
        if shots < 1 {
            return Err(Error::InvalidArgument("shot budget must be ≥ 1".into()));
        }
        self.shots = ShotBudget::Shots(shots);
        self.shot_seed = seed;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            KernelKind::Rbf { gamma } | KernelKind::Projected { gamma, .. } => {
                if *gamma <= 0.0 || !gamma.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "gamma must be a positive finite number, got {gamma}"
                    )));
                }
            }
            KernelKind::Fidelity { .. } => {}
        }
        if let Some(map) = self.kind.feature_map() {
            map.validate()?;
        }
        if let ShotBudget::Shots(0) = self.shots {
            return Err(Error::InvalidArgument("shot budget must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Default bandwidth for the projected kernel: averages the exponent over
/// the 3n expectation differences.
pub fn projected_default_gamma(n_qubits: usize) -> f64 {
    1.0 / (3.0 * n_qubits as f64)
}

/// `exp(-γ‖x - y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gamma must be a positive finite number, got {gamma}"
        )));
    }
    let dist_sqr: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-gamma * dist_sqr).exp())
}

/// `|⟨ψ(x)|ψ(y)⟩|²` between two embedded states.
pub fn fidelity_from_states(a: &Statevector, b: &Statevector) -> Result<f64> {
    let overlap = a.inner_product(b)?;
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}

/// Fidelity kernel computed by two embeddings and an inner product.
pub fn fidelity_kernel(x: &[f64], y: &[f64], config: &KernelConfig) -> Result<f64> {
    let map = match &config.kind {
        KernelKind::Fidelity { map } => map,
        other => {
            return Err(Error::InvalidArgument(format!(
                "fidelity_kernel called with {} config",
                other.name()
            )))
        }
    };
    let a = featuremap::embed(x, map)?;
    let b = featuremap::embed(y, map)?;
    fidelity_from_states(&a, &b)
}

/// The return-probability route of the measurement scheme: run the
/// embedding of `x`, then the inverse embedding of `y`, and read
/// `|⟨0…0|ψ⟩|²`. Agrees with [`fidelity_kernel`] to simulation accuracy.
pub fn fidelity_via_return_probability(
    x: &[f64],
    y: &[f64],
    map: &FeatureMapConfig,
) -> Result<f64> {
    let mut state = Statevector::zero(map.n_qubits)?;
    state.run_circuit(&featuremap::build_embedding(x, map)?)?;
    state.run_circuit(&featuremap::build_embedding(y, map)?.inverted())?;
    Ok(state.amplitudes()[0].norm_sqr().clamp(0.0, 1.0))
}

/// Per-qubit Pauli expectations of the embedded state, laid out as
/// `[⟨X_0⟩, ⟨Y_0⟩, ⟨Z_0⟩, ⟨X_1⟩, …]`.
pub fn pauli_profile(x: &[f64], map: &FeatureMapConfig) -> Result<Vec<f64>> {
    let state = featuremap::embed(x, map)?;
    let mut profile = Vec::with_capacity(3 * map.n_qubits);
    for q in 0..map.n_qubits {
        for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
            profile.push(state.pauli_expectation(pauli, q)?);
        }
    }
    Ok(profile)
}

pub(crate) fn projected_from_profiles(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let dist_sqr: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
    (-gamma * dist_sqr).exp()
}

/// Projected quantum kernel: Gaussian over differences of single-qubit
/// Pauli expectations.
pub fn projected_kernel(x: &[f64], y: &[f64], config: &KernelConfig) -> Result<f64> {
    let (map, gamma) = match &config.kind {
        KernelKind::Projected { map, gamma } => (map, *gamma),
        other => {
            return Err(Error::InvalidArgument(format!(
                "projected_kernel called with {} config",
                other.name()
            )))
        }
    };
    config.validate()?;
    let a = pauli_profile(x, map)?;
    let b = pauli_profile(y, map)?;
    Ok(projected_from_profiles(&a, &b, gamma))
}

/// Evaluates one kernel entry exactly, dispatching on the configured kind.
pub fn kernel_value(x: &[f64], y: &[f64], config: &KernelConfig) -> Result<f64> {
    match &config.kind {
        KernelKind::Rbf { gamma } => rbf_kernel(x, y, *gamma),
        KernelKind::Fidelity { .. } => fidelity_kernel(x, y, config),
        KernelKind::Projected { .. } => projected_kernel(x, y, config),
    }
}

/// Models return-probability estimation from a finite shot budget:
/// draws `B ~ Binomial(shots, exact)` from `rng` and returns `B / shots`.
pub fn sample_kernel<R: Rng>(exact: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if shots < 1 {
        return Err(Error::InvalidArgument("shot count must be ≥ 1".into()));
    }
    if !exact.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exact kernel value must be finite, got {exact}"
        )));
    }
    // Simulation round-off can leave values a few ulp outside [0, 1].
    let p = exact.clamp(0.0, 1.0);
    let binomial = Binomial::new(shots, p)
        .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))?;
    Ok(binomial.sample(rng) as f64 / shots as f64)
}
