//! End-to-end benchmark: ingest → subsample → scale → PCA sweep → Gram →
//! train → score → one results row per (feature count, model).
//!
//! The results CSV is deterministic for a fixed config: seeds drive every
//! random choice and the `seconds` column is the estimated wall time of the
//! same kernel workload on the configured hardware profile (0 for models
//! whose kernels need no quantum evaluations), not a measured runtime.

use std::io::Write;
use std::path::Path;

use qkad_core::dataset::{self, Dataset};
use qkad_core::featuremap::FeatureMapConfig;
use qkad_core::kernel::ShotBudget;
use qkad_core::metrics::{average_precision, best_f1};
use qkad_core::models::{
    predict_scores, train_logreg, train_ocsvm, train_svc, ModelKind, SavedModel,
};
use qkad_core::resource::{
    find_profile, inference_evals, training_evals, wall_time_seconds, EvalConvention, WorkloadSpec,
};
use qkad_core::tuning::{random_search, SearchSpace};
use qkad_core::workflow::{kernel_for, stratified_split, FitParams};
use qkad_core::{Error, Result};

use crate::cache::{cached_cross, cached_gram};
use crate::config::{EvalOn, RunConfig};

pub const RESULTS_HEADER: &str = "n_features,model,kernel,ap,f1,seconds";

/// One results row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub n_features: usize,
    pub model: ModelKind,
    pub ap: f64,
    pub f1: f64,
    pub seconds: f64,
}

struct Split {
    train: Dataset,
    eval: Dataset,
}

fn labeled(dataset: &Dataset) -> Result<&Vec<u8>> {
    dataset
        .labels
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("benchmark needs labeled data".into()))
}

/// Runs the benchmark, streaming rows into `<output_dir>/results.csv` as
/// they finish so partial results survive a failure.
pub fn run(config: &RunConfig) -> Result<Vec<BenchmarkRow>> {
    config.validate()?;
    let profile = find_profile(&config.estimate_profile)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let results_path = config.output_dir.join("results.csv");
    let mut results = std::io::BufWriter::new(std::fs::File::create(&results_path)?);
    writeln!(results, "{RESULTS_HEADER}")?;
    results.flush()?;

    let full = dataset::load_csv(&config.dataset)?;
    let subsample = dataset::subsample(
        &full,
        config.n_nominal,
        config.n_fraud,
        config.subsample_seed,
    )?;

    // Scaler fit set: the subsample by default, the full dataset on request.
    let scaler_fit_set = if config.fit_on_full {
        &full
    } else {
        &subsample
    };
    let scaler = dataset::fit_scaler(scaler_fit_set)?;
    let scaled = dataset::apply_scaler(&subsample, &scaler)?;
    let scaled_fit_set = if config.fit_on_full {
        dataset::apply_scaler(&full, &scaler)?
    } else {
        scaled.clone()
    };

    let shots = match config.shots {
        None => ShotBudget::Exact,
        Some(n) => ShotBudget::Shots(n),
    };
    let cache_dir = config.cache_dir.as_deref();

    let mut rows = Vec::new();
    for &n_components in &config.sweep {
        let pca = dataset::fit_pca(&scaled_fit_set, n_components)?;
        let projected = dataset::apply_pca(&scaled, &pca)?;
        let quantum = dataset::apply_eta(&projected, config.eta)?;

        let split_classical = split_dataset(&projected, config)?;
        let split_quantum = split_dataset(&quantum, config)?;

        for &kind in &config.models {
            let split = if kind.is_quantum() {
                &split_quantum
            } else {
                &split_classical
            };
            let map = kind.is_quantum().then_some(FeatureMapConfig {
                n_qubits: n_components,
                depth: config.depth,
                eta: 1.0, // η is already applied to the features
                interleave_seed: config.interleave_seed,
                interleave_layers: config.interleave_layers,
            });

            let params = resolve_params(config, kind, map.as_ref(), split)?;
            let row = run_one(config, kind, map.as_ref(), &params, split, shots, cache_dir)?;
            let eval_labels = labeled(&split.eval)?;
            let ap = average_precision(&row.0, eval_labels)?;
            let (_, f1) = best_f1(&row.0, eval_labels)?;
            let seconds = estimated_seconds(kind, row.1, split.eval.n_rows(), config, &profile);

            let record = BenchmarkRow {
                n_features: n_components,
                model: kind,
                ap,
                f1,
                seconds,
            };
            writeln!(
                results,
                "{},{},{},{},{},{}",
                record.n_features,
                record.model,
                kind.kernel_name(),
                record.ap,
                record.f1,
                record.seconds
            )?;
            results.flush()?;
            rows.push(record);
        }
    }
    Ok(rows)
}

fn split_dataset(data: &Dataset, config: &RunConfig) -> Result<Split> {
    let labels = labeled(data)?;
    match config.eval_on {
        EvalOn::HeldOut => {
            let (train_idx, eval_idx) =
                stratified_split(labels, config.split_frac, config.split_seed)?;
            Ok(Split {
                train: data.select_rows(&train_idx),
                eval: data.select_rows(&eval_idx),
            })
        }
        EvalOn::Train => Ok(Split {
            train: data.clone(),
            eval: data.clone(),
        }),
    }
}

fn resolve_params(
    config: &RunConfig,
    kind: ModelKind,
    map: Option<&FeatureMapConfig>,
    split: &Split,
) -> Result<FitParams> {
    let base = FitParams {
        c: config.c,
        nu: config.nu,
        gamma: config.gamma,
    };
    let Some(tune) = &config.tune else {
        return Ok(base);
    };
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
    let outcome = random_search(&split.train, kind, map, &space, tune.k_folds)?;
    let tuned = outcome.best.params.to_fit_params();
    Ok(FitParams {
        c: if space.c.is_some() { tuned.c } else { base.c },
        nu: if space.nu.is_some() {
            tuned.nu
        } else {
            base.nu
        },
        gamma: if space.gamma.is_some() {
            tuned.gamma
        } else {
            base.gamma
        },
    })
}

/// Trains one model and scores the evaluation rows. Returns the scores and
/// the number of rows the kernel model was fit on (0 for the baseline).
fn run_one(
    config: &RunConfig,
    kind: ModelKind,
    map: Option<&FeatureMapConfig>,
    params: &FitParams,
    split: &Split,
    shots: ShotBudget,
    cache_dir: Option<&Path>,
) -> Result<(Vec<f64>, usize)> {
    let train_labels = labeled(&split.train)?;
    match kind {
        ModelKind::Logreg => {
            let model = train_logreg(split.train.features.view(), train_labels, params.c)?;
            let scores = model.predict_scores(split.eval.features.view())?;
            Ok((scores, 0))
        }
        ModelKind::SvcRbf | ModelKind::SvcFidelity => {
            let kernel = kernel_for(
                kind,
                map,
                params,
                split.train.features.view(),
                shots,
                config.shot_seed,
            )?
            .expect("kernel model");
            let k = cached_gram(
                cache_dir,
                &split.train.provenance,
                split.train.features.view(),
                &split.train.row_ids,
                &kernel,
            )?;
            let y: Vec<f64> = train_labels.iter().map(|&l| 2.0 * l as f64 - 1.0).collect();
            let model = train_svc(&k, &y, params.c)?;
            let cross = cached_cross(
                cache_dir,
                &split.train.provenance,
                split.eval.features.view(),
                &split.eval.row_ids,
                split.train.features.view(),
                &split.train.row_ids,
                &kernel,
            )?;
            let scores = predict_scores(&SavedModel::Svc(model), cross.view())?;
            Ok((scores, split.train.n_rows()))
        }
        ModelKind::OcsvmRbf | ModelKind::OcsvmFidelity | ModelKind::OcsvmProjected => {
            let nominal_idx = split.train.class_indices(0);
            if nominal_idx.is_empty() {
                return Err(Error::InvalidArgument(
                    "one-class training needs nominal rows".into(),
                ));
            }
            let nominal = split.train.select_rows(&nominal_idx);
            let kernel = kernel_for(
                kind,
                map,
                params,
                nominal.features.view(),
                shots,
                config.shot_seed,
            )?
            .expect("kernel model");
            let k = cached_gram(
                cache_dir,
                &nominal.provenance,
                nominal.features.view(),
                &nominal.row_ids,
                &kernel,
            )?;
            let model = train_ocsvm(&k, params.nu)?;
            let cross = cached_cross(
                cache_dir,
                &nominal.provenance,
                split.eval.features.view(),
                &split.eval.row_ids,
                nominal.features.view(),
                &nominal.row_ids,
                &kernel,
            )?;
            let scores = predict_scores(&SavedModel::OcSvm(model), cross.view())?;
            Ok((scores, nominal.n_rows()))
        }
    }
}

/// Estimated hardware wall time for the row's kernel workload: the training
/// Gram (upper triangle) plus scoring the evaluation rows, at the configured
/// shot budget and profile. Classical kernels run no quantum circuits.
fn estimated_seconds(
    kind: ModelKind,
    n_fit_rows: usize,
    n_eval_rows: usize,
    config: &RunConfig,
    profile: &qkad_core::resource::HardwareProfile,
) -> f64 {
    if !kind.is_quantum() {
        return 0.0;
    }
    let spec = WorkloadSpec {
        n_samples: n_fit_rows as u64,
        n_queries: n_eval_rows as u64,
        n_shots: config.estimate_shots,
        convention: EvalConvention::Triangle,
    };
    let evals = training_evals(&spec) + inference_evals(spec.n_queries, spec.n_samples);
    wall_time_seconds(evals, spec.n_shots, profile)
}
