//! Shared train/evaluate machinery: label-stratified splits and folds, and
//! the kernel/model dispatch used by both hyperparameter search and the
//! benchmark command.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::pooled_variance;
use crate::error::{Error, Result};
use crate::featuremap::FeatureMapConfig;
use crate::gram::{gram, gram_cross};
use crate::kernel::{projected_default_gamma, KernelConfig, ShotBudget};
use crate::models::{train_logreg, train_ocsvm, train_svc, ModelKind, SavedModel};

/// Hyperparameters resolved for one training run. A missing `gamma` falls
/// back to the kind's default rule (`1/(F·Var)` for RBF, `1/(3n)` for the
/// projected kernel).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub c: f64,
    pub nu: f64,
    pub gamma: Option<f64>,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            nu: 0.1,
            gamma: None,
        }
    }
}

/// Shuffles each class separately and deals rows round-robin into `k`
/// validation folds. Every row lands in exactly one fold.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Stratification(format!("need k ≥ 2 folds, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::Stratification(format!(
            "cannot split {} rows into {k} folds",
            labels.len()
        )));
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for class in [0u8, 1u8] {
        let mut indices: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        indices.shuffle(&mut rng);
        for (slot, row) in indices.into_iter().enumerate() {
            folds[slot % k].push(row);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    if folds
        .iter()
        .any(|fold| !fold.iter().any(|&i| labels[i] == 1))
    {
        return Err(Error::Stratification(
            "a fold has no positive labels; reduce k or add positives".into(),
        ));
    }
    Ok(folds)
}

/// Seeded stratified train/eval split; `train_frac` of each class (rounded)
/// goes to the training side. Row order within each side is preserved.
pub fn stratified_split(
    labels: &[u8],
    train_frac: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if train_frac.is_nan() || train_frac <= 0.0 || train_frac >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_frac}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut eval = Vec::new();
    for class in [0u8, 1u8] {
        let mut indices: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if indices.is_empty() {
            continue;
        }
        indices.shuffle(&mut rng);
        let len = indices.len();
        let upper = if len > 1 { len - 1 } else { 1 };
        let n_train = ((len as f64 * train_frac).round() as usize).clamp(1, upper);
        train.extend(indices.drain(..n_train));
        eval.extend(indices);
    }
    train.sort_unstable();
    eval.sort_unstable();
    if eval.is_empty() {
        return Err(Error::Stratification("evaluation side is empty".into()));
    }
    Ok((train, eval))
}

/// Builds the kernel configuration a model kind needs over the given
/// training features, or `None` for the linear baseline.
pub fn kernel_for(
    kind: ModelKind,
    map: Option<&FeatureMapConfig>,
    params: &FitParams,
    train_features: ArrayView2<f64>,
    shots: ShotBudget,
    shot_seed: u64,
) -> Result<Option<KernelConfig>> {
    let quantum_map = || -> Result<FeatureMapConfig> {
        let map = map.ok_or_else(|| {
            Error::InvalidArgument(format!("model kind {kind} needs a feature map"))
        })?;
        if map.n_qubits != train_features.ncols() {
            return Err(Error::DimensionMismatch {
                left: map.n_qubits,
                right: train_features.ncols(),
            });
        }
        Ok(map.clone())
    };
    let config = match kind {
        ModelKind::Logreg => return Ok(None),
        ModelKind::SvcRbf | ModelKind::OcsvmRbf => {
            let gamma = match params.gamma {
                Some(g) => g,
                None => default_rbf_gamma(train_features)?,
            };
            KernelConfig::rbf(gamma)
        }
        ModelKind::SvcFidelity | ModelKind::OcsvmFidelity => KernelConfig::fidelity(quantum_map()?),
        ModelKind::OcsvmProjected => {
            let map = quantum_map()?;
            let gamma = params
                .gamma
                .unwrap_or_else(|| projected_default_gamma(map.n_qubits));
            KernelConfig::projected(map, gamma)
        }
    };
    let config = match shots {
        ShotBudget::Exact => config,
        ShotBudget::Shots(n) => config.with_shots(n, shot_seed)?,
    };
    Ok(Some(config))
}

/// Default RBF bandwidth `γ = 1/(F · Var)` with the pooled population
/// variance of all feature entries.
pub fn default_rbf_gamma(features: ArrayView2<f64>) -> Result<f64> {
    if features.is_empty() {
        return Err(Error::InvalidArgument("empty feature matrix".into()));
    }
    let var = pooled_variance(features);
    if var <= 0.0 {
        return Err(Error::InvalidArgument(
            "zero pooled variance; cannot derive default gamma".into(),
        ));
    }
    Ok(1.0 / (features.ncols() as f64 * var))
}

fn labels_to_pm1(labels: &[u8]) -> Vec<f64> {
    labels.iter().map(|&l| 2.0 * l as f64 - 1.0).collect()
}

/// Trains `kind` on the labeled training rows and returns anomaly scores
/// for the evaluation rows (higher = more anomalous). One-class models are
/// fit on the nominal training rows only.
#[allow(clippy::too_many_arguments)]
pub fn fit_and_score(
    kind: ModelKind,
    map: Option<&FeatureMapConfig>,
    params: &FitParams,
    train_features: ArrayView2<f64>,
    train_labels: &[u8],
    eval_features: ArrayView2<f64>,
    shots: ShotBudget,
    shot_seed: u64,
) -> Result<Vec<f64>> {
    let (model, fit_rows) = fit_model(
        kind,
        map,
        params,
        train_features,
        train_labels,
        shots,
        shot_seed,
    )?;
    score_rows(
        &model,
        kind,
        map,
        params,
        train_features,
        &fit_rows,
        eval_features,
        shots,
        shot_seed,
    )
}

/// Trains a model; returns it plus the indices of the training rows the
/// model was actually fit on (the nominal subset for one-class kinds).
pub fn fit_model(
    kind: ModelKind,
    map: Option<&FeatureMapConfig>,
    params: &FitParams,
    train_features: ArrayView2<f64>,
    train_labels: &[u8],
    shots: ShotBudget,
    shot_seed: u64,
) -> Result<(SavedModel, Vec<usize>)> {
    if train_labels.len() != train_features.nrows() {
        return Err(Error::DimensionMismatch {
            left: train_labels.len(),
            right: train_features.nrows(),
        });
    }
    match kind {
        ModelKind::Logreg => {
            let model = train_logreg(train_features, train_labels, params.c)?;
            Ok((
                SavedModel::LogReg(model),
                (0..train_features.nrows()).collect(),
            ))
        }
        ModelKind::SvcRbf | ModelKind::SvcFidelity => {
            let config = kernel_for(kind, map, params, train_features, shots, shot_seed)?
                .expect("kernel kinds have a config");
            let ids: Vec<String> = (0..train_features.nrows()).map(|i| i.to_string()).collect();
            let k = gram(train_features, &ids, &config)?;
            let y = labels_to_pm1(train_labels);
            let model = train_svc(&k, &y, params.c)?;
            Ok((
                SavedModel::Svc(model),
                (0..train_features.nrows()).collect(),
            ))
        }
        ModelKind::OcsvmRbf | ModelKind::OcsvmFidelity | ModelKind::OcsvmProjected => {
            let nominal: Vec<usize> = (0..train_labels.len())
                .filter(|&i| train_labels[i] == 0)
                .collect();
            if nominal.is_empty() {
                return Err(Error::InvalidArgument(
                    "one-class training needs nominal rows".into(),
                ));
            }
            let nominal_features = train_features.select(ndarray::Axis(0), &nominal);
            let config = kernel_for(kind, map, params, nominal_features.view(), shots, shot_seed)?
                .expect("kernel kinds have a config");
            let ids: Vec<String> = nominal.iter().map(|i| i.to_string()).collect();
            let k = gram(nominal_features.view(), &ids, &config)?;
            let model = train_ocsvm(&k, params.nu)?;
            Ok((SavedModel::OcSvm(model), nominal))
        }
    }
}

/// Scores evaluation rows with a model produced by [`fit_model`].
#[allow(clippy::too_many_arguments)]
pub fn score_rows(
    model: &SavedModel,
    kind: ModelKind,
    map: Option<&FeatureMapConfig>,
    params: &FitParams,
    train_features: ArrayView2<f64>,
    fit_rows: &[usize],
    eval_features: ArrayView2<f64>,
    shots: ShotBudget,
    shot_seed: u64,
) -> Result<Vec<f64>> {
    match model {
        SavedModel::LogReg(m) => m.predict_scores(eval_features),
        SavedModel::Svc(m) => {
            let config = kernel_for(kind, map, params, train_features, shots, shot_seed)?
                .expect("kernel kinds have a config");
            let cross = gram_cross(eval_features, train_features, &config)?;
            m.predict_scores(cross.view())
        }
        SavedModel::OcSvm(m) => {
            let fit_features = train_features.select(ndarray::Axis(0), fit_rows);
            let config = kernel_for(kind, map, params, fit_features.view(), shots, shot_seed)?
                .expect("kernel kinds have a config");
            let cross = gram_cross(eval_features, fit_features.view(), &config)?;
            m.predict_scores(cross.view())
        }
    }
}
