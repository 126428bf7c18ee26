//! Run configuration: JSON-loadable, with every seed explicit so a config
//! file pins the whole pipeline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qkad_core::dataset::RAW_FEATURES;
use qkad_core::models::ModelKind;
use qkad_core::tuning::ParamDist;
use qkad_core::{Error, Result};

/// Where the reported average precision is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalOn {
    /// Stratified held-out split (the default).
    HeldOut,
    /// Train and score on the full subsample.
    Train,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuneConfig {
    pub n_trials: usize,
    pub k_folds: usize,
    pub seed: u64,
    /// Overrides of the per-kind default search space.
    pub c: Option<ParamDist>,
    pub gamma: Option<ParamDist>,
    pub nu: Option<ParamDist>,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self {
            n_trials: 20,
            k_folds: 5,
            seed: 0,
            c: None,
            gamma: None,
            nu: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Raw fraud CSV (Kaggle schema).
    pub dataset: PathBuf,
    pub output_dir: PathBuf,
    /// Gram matrices are cached here when set, keyed by content hash.
    pub cache_dir: Option<PathBuf>,
    pub models: Vec<ModelKind>,
    /// Principal-component counts to sweep.
    pub sweep: Vec<usize>,
    pub n_nominal: usize,
    pub n_fraud: usize,
    pub subsample_seed: u64,
    pub split_frac: f64,
    pub split_seed: u64,
    pub eval_on: EvalOn,
    pub eta: f64,
    pub depth: usize,
    pub interleave_seed: u64,
    pub interleave_layers: usize,
    pub gamma: Option<f64>,
    pub c: f64,
    pub nu: f64,
    /// Finite shot budget for kernel estimation; absent = exact values.
    pub shots: Option<u64>,
    pub shot_seed: u64,
    /// Fit the scaler and PCA on the full dataset instead of the subsample.
    pub fit_on_full: bool,
    pub tune: Option<TuneConfig>,
    /// Hardware profile used for the estimated-seconds column.
    pub estimate_profile: String,
    pub estimate_shots: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: PathBuf::from("creditcard.csv"),
            output_dir: PathBuf::from("out"),
            cache_dir: None,
            models: vec![ModelKind::OcsvmRbf],
            sweep: vec![2, 5, 10],
            n_nominal: 500,
            n_fraud: 25,
            subsample_seed: 42,
            split_frac: 0.7,
            split_seed: 43,
            eval_on: EvalOn::HeldOut,
            eta: 0.1,
            depth: 3,
            interleave_seed: 7,
            interleave_layers: 2,
            gamma: None,
            c: 1.0,
            nu: 0.1,
            shots: None,
            shot_seed: 11,
            fit_on_full: false,
            tune: None,
            estimate_profile: "sc-optimistic".into(),
            estimate_shots: 1_000,
        }
    }
}

impl RunConfig {
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(&path)?;
        let config: RunConfig = serde_json::from_reader(file)?;
        Ok(config)
    }

    /// Overrides every seed with one value (`--seed`).
    pub fn override_seeds(&mut self, seed: u64) {
        self.subsample_seed = seed;
        self.split_seed = seed;
        self.interleave_seed = seed;
        self.shot_seed = seed;
        if let Some(tune) = &mut self.tune {
            tune.seed = seed;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidArgument("no model kinds selected".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::InvalidArgument("empty component sweep".into()));
        }
        if let Some(&bad) = self.sweep.iter().find(|&&n| n == 0 || n > RAW_FEATURES) {
            return Err(Error::InvalidArgument(format!(
                "sweep value {bad} outside 1..={RAW_FEATURES}"
            )));
        }
        if !(self.split_frac > 0.0 && self.split_frac < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "split fraction must lie in (0, 1), got {}",
                self.split_frac
            )));
        }
        if self.shots == Some(0) {
            return Err(Error::InvalidArgument("shot budget must be ≥ 1".into()));
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument("depth must be ≥ 1".into()));
        }
        if self.eta <= 0.0 || !self.eta.is_finite() {
            return Err(Error::InvalidArgument("eta must be positive".into()));
        }
        Ok(())
    }
}
