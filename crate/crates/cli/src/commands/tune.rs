//! Tune: random-search hyperparameters on the preprocessed subsample and
//! write the trials log plus the winning parameters.

use std::path::PathBuf;

use qkad_core::dataset;
use qkad_core::featuremap::FeatureMapConfig;
use qkad_core::tuning::{random_search, write_trials_csv, SearchOutcome, SearchSpace};
use qkad_core::{Error, Result};

use crate::config::RunConfig;

pub struct TuneOutput {
    pub trials_path: PathBuf,
    pub best_path: PathBuf,
    pub outcome: SearchOutcome,
}

/// Tunes `models[0]` at `sweep[0]` principal components.
pub fn run(config: &RunConfig) -> Result<TuneOutput> {
    config.validate()?;
    let tune = config.tune.clone().unwrap_or_default();
    let kind = config.models[0];
    let n_components = config.sweep[0];

    let full = dataset::load_csv(&config.dataset)?;
    let subsample = dataset::subsample(
        &full,
        config.n_nominal,
        config.n_fraud,
        config.subsample_seed,
    )?;
    let scaler = dataset::fit_scaler(&subsample)?;
    let scaled = dataset::apply_scaler(&subsample, &scaler)?;
    let pca = dataset::fit_pca(&scaled, n_components)?;
    let projected = dataset::apply_pca(&scaled, &pca)?;
    let data = if kind.is_quantum() {
        dataset::apply_eta(&projected, config.eta)?
    } else {
        projected
    };

    let map = kind.is_quantum().then_some(FeatureMapConfig {
        n_qubits: n_components,
        depth: config.depth,
        eta: 1.0, // η already applied to the features
        interleave_seed: config.interleave_seed,
        interleave_layers: config.interleave_layers,
    });

    let mut space = SearchSpace::default_for(kind);
    space.n_trials = tune.n_trials;
    space.seed = tune.seed;
    if tune.c.is_some() {
        space.c = tune.c.clone();
    }
    if tune.gamma.is_some() {
        space.gamma = tune.gamma.clone();
    }
    if tune.nu.is_some() {
        space.nu = tune.nu.clone();
    }

    let outcome = random_search(&data, kind, map.as_ref(), &space, tune.k_folds)?;

    std::fs::create_dir_all(&config.output_dir)?;
    let trials_path = config.output_dir.join("trials.csv");
    let best_path = config.output_dir.join("best_params.json");
    write_trials_csv(&outcome, std::fs::File::create(&trials_path)?)?;
    serde_json::to_writer_pretty(std::fs::File::create(&best_path)?, &outcome.best)
        .map_err(Error::Json)?;

    Ok(TuneOutput {
        trials_path,
        best_path,
        outcome,
    })
}

pub fn describe(output: &TuneOutput, out: &mut impl std::io::Write) -> Result<()> {
    let best = &output.outcome.best;
    writeln!(
        out,
        "best trial {} (mean AP {}): c={:?} gamma={:?} nu={:?}",
        best.trial, best.mean_score, best.params.c, best.params.gamma, best.params.nu
    )?;
    writeln!(
        out,
        "wrote {} and {}",
        output.trials_path.display(),
        output.best_path.display()
    )?;
    Ok(())
}
