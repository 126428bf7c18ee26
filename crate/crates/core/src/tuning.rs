//! Random-search hyperparameter optimization with cross-validated average
//! precision. Supervised models train on k−1 folds with labels; one-class
//! models train on the nominal rows of those folds and are validated with
//! labels on the held-out fold (the usual concession for benchmarking
//! unsupervised detectors).

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::featuremap::FeatureMapConfig;
use crate::kernel::ShotBudget;
use crate::metrics::average_precision;
use crate::models::ModelKind;
use crate::workflow::{fit_and_score, stratified_folds, FitParams};

/// One sampling distribution for a hyperparameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum ParamDist {
    LogUniform { lo: f64, hi: f64 },
    Choice { values: Vec<f64> },
}

impl ParamDist {
    fn validate(&self) -> Result<()> {
        match self {
            ParamDist::LogUniform { lo, hi } => {
                if lo.is_nan() || hi.is_nan() || *lo <= 0.0 || hi <= lo {
                    return Err(Error::InvalidArgument(format!(
                        "log-uniform needs 0 < lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            ParamDist::Choice { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidArgument("empty choice set".into()));
                }
            }
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            ParamDist::LogUniform { lo, hi } => {
                let u = rng.random_range(lo.ln()..hi.ln());
                u.exp()
            }
            ParamDist::Choice { values } => values[rng.random_range(0..values.len())],
        }
    }
}

/// Per-parameter distributions plus the trial budget and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub c: Option<ParamDist>,
    pub gamma: Option<ParamDist>,
    pub nu: Option<ParamDist>,
    pub n_trials: usize,
    pub seed: u64,
}

impl SearchSpace {
    /// Default space per model kind: C log-uniform [1e−2, 1e2], γ
    /// log-uniform [1e−4, 1e1], ν over {0.05, 0.10, …, 0.50}.
    pub fn default_for(kind: ModelKind) -> Self {
        let c = ParamDist::LogUniform { lo: 1e-2, hi: 1e2 };
        let gamma = ParamDist::LogUniform { lo: 1e-4, hi: 1e1 };
        let nu = ParamDist::Choice {
            values: (1..=10).map(|i| i as f64 * 0.05).collect(),
        };
        let (c, gamma, nu) = match kind {
            ModelKind::Logreg => (Some(c), None, None),
            ModelKind::SvcRbf => (Some(c), Some(gamma), None),
            ModelKind::SvcFidelity => (Some(c), None, None),
            ModelKind::OcsvmRbf => (None, Some(gamma), Some(nu)),
            ModelKind::OcsvmFidelity => (None, None, Some(nu)),
            ModelKind::OcsvmProjected => (None, Some(gamma), Some(nu)),
        };
        Self {
            c,
            gamma,
            nu,
            n_trials: 20,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::InvalidArgument("n_trials must be ≥ 1".into()));
        }
        for dist in [&self.c, &self.gamma, &self.nu].into_iter().flatten() {
            dist.validate()?;
        }
        Ok(())
    }
}

/// Parameters drawn for one trial; absent entries fall back to defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub nu: Option<f64>,
}

impl TrialParams {
    pub fn to_fit_params(self) -> FitParams {
        let defaults = FitParams::default();
        FitParams {
            c: self.c.unwrap_or(defaults.c),
            nu: self.nu.unwrap_or(defaults.nu),
            gamma: self.gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub params: TrialParams,
    pub fold_scores: Vec<f64>,
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: TrialResult,
    pub trials: Vec<TrialResult>,
}

/// Runs the random search. Deterministic per seed; ties in mean AP go to
/// the earliest trial.
pub fn random_search(
    data: &Dataset,
    kind: ModelKind,
    map: Option<&FeatureMapConfig>,
    space: &SearchSpace,
    k_folds: usize,
) -> Result<SearchOutcome> {
    space.validate()?;
    let labels = data
        .labels
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("random search needs a labeled dataset".into()))?;
    let folds = stratified_folds(labels, k_folds, space.seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
    let mut trials = Vec::with_capacity(space.n_trials);
    for trial in 0..space.n_trials {
        // Draw in a fixed field order so the stream is reproducible.
        let params = TrialParams {
            c: space.c.as_ref().map(|d| d.sample(&mut rng)),
            gamma: space.gamma.as_ref().map(|d| d.sample(&mut rng)),
            nu: space.nu.as_ref().map(|d| d.sample(&mut rng)),
        };
        let fit_params = params.to_fit_params();

        let mut fold_scores = Vec::with_capacity(k_folds);
        for fold in &folds {
            let train_idx: Vec<usize> = (0..labels.len()).filter(|i| !fold.contains(i)).collect();
            let train = data.select_rows(&train_idx);
            let val = data.select_rows(fold);
            let train_labels = train.labels.as_ref().expect("labels selected");
            let val_labels = val.labels.as_ref().expect("labels selected");
            let scores = fit_and_score(
                kind,
                map,
                &fit_params,
                train.features.view(),
                train_labels,
                val.features.view(),
                ShotBudget::Exact,
                0,
            )?;
            fold_scores.push(average_precision(&scores, val_labels)?);
        }
        let mean_score = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
        trials.push(TrialResult {
            trial,
            params,
            fold_scores,
            mean_score,
        });
    }

    let best = trials
        .iter()
        .max_by(|a, b| {
            a.mean_score
                .partial_cmp(&b.mean_score)
                .unwrap_or(std::cmp::Ordering::Equal)
                // Strictly-greater wins; on ties keep the earlier trial.
                .then(b.trial.cmp(&a.trial))
        })
        .expect("at least one trial")
        .clone();

    Ok(SearchOutcome { best, trials })
}

/// Writes the trials log as CSV:
/// `trial,c,gamma,nu,fold_1..fold_k,mean`.
pub fn write_trials_csv<W: Write>(outcome: &SearchOutcome, mut writer: W) -> Result<()> {
    let k = outcome
        .trials
        .first()
        .map(|t| t.fold_scores.len())
        .unwrap_or(0);
    let fold_headers: Vec<String> = (1..=k).map(|i| format!("fold_{i}")).collect();
    writeln!(writer, "trial,c,gamma,nu,{},mean", fold_headers.join(","))?;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for t in &outcome.trials {
        let folds: Vec<String> = t.fold_scores.iter().map(|s| s.to_string()).collect();
        writeln!(
            writer,
            "{},{},{},{},{},{}",
            t.trial,
            fmt(t.params.c),
            fmt(t.params.gamma),
            fmt(t.params.nu),
            folds.join(","),
            t.mean_score
        )?;
    }
    Ok(())
}
