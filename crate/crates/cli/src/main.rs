use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use qkad_cli::commands::{benchmark, estimate, gram_cmd, ingest, tune};
use qkad_cli::config::{EvalOn, RunConfig, TuneConfig};
use qkad_cli::exit_code;
use qkad_core::models::ModelKind;
use qkad_core::resource::EvalConvention;

/// Quantum-kernel anomaly detection benchmark driver.
#[derive(Parser)]
#[command(name = "qkad", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the raw fraud CSV, subsample, optionally preprocess, and write
    /// the processed dataset with its provenance sidecar.
    Ingest(IngestArgs),
    /// Run the full benchmark sweep and write results.csv.
    Benchmark(BenchmarkArgs),
    /// Random-search hyperparameters; writes trials.csv and best_params.json.
    Tune(BenchmarkArgs),
    /// Estimate hardware wall-clock costs for kernel workloads.
    Estimate(EstimateArgs),
    /// Compute a Gram matrix for a processed dataset.
    Gram(GramArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Raw credit-card CSV (Time, V1…V28, Amount, Class).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
    #[arg(long, default_value_t = 500)]
    n_nominal: usize,
    #[arg(long, default_value_t = 25)]
    n_fraud: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Standard-scale the subsample.
    #[arg(long)]
    scale: bool,
    /// Project onto the first N principal components (implies --scale).
    #[arg(long)]
    pca: Option<usize>,
    /// Multiply features by this prefactor after PCA.
    #[arg(long)]
    eta: Option<f64>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override every seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Comma-separated model kinds (logreg, svc-rbf, svc-fidelity,
    /// ocsvm-rbf, ocsvm-fidelity, ocsvm-projected).
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
    /// Comma-separated principal-component counts.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    #[arg(long)]
    n_nominal: Option<usize>,
    #[arg(long)]
    n_fraud: Option<usize>,
    #[arg(long)]
    split_frac: Option<f64>,
    /// held-out | train
    #[arg(long)]
    eval_on: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Finite shot budget; omit for exact kernels.
    #[arg(long)]
    shots: Option<u64>,
    /// Fit scaler and PCA on the full dataset instead of the subsample.
    #[arg(long)]
    fit_on_full: bool,
    /// Enable tuning with this many random-search trials.
    #[arg(long)]
    tune_trials: Option<usize>,
    #[arg(long)]
    k_folds: Option<usize>,
    #[arg(long)]
    estimate_profile: Option<String>,
    #[arg(long)]
    estimate_shots: Option<u64>,
}

impl BenchmarkArgs {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.dataset {
            config.dataset = v;
        }
        if let Some(v) = self.output_dir {
            config.output_dir = v;
        }
        if self.cache_dir.is_some() {
            config.cache_dir = self.cache_dir;
        }
        if let Some(v) = self.models {
            config.models = v;
        }
        if let Some(v) = self.sweep {
            config.sweep = v;
        }
        if let Some(v) = self.n_nominal {
            config.n_nominal = v;
        }
        if let Some(v) = self.n_fraud {
            config.n_fraud = v;
        }
        if let Some(v) = self.split_frac {
            config.split_frac = v;
        }
        if let Some(v) = self.eval_on {
            config.eval_on = match v.as_str() {
                "held-out" => EvalOn::HeldOut,
                "train" => EvalOn::Train,
                other => anyhow::bail!("unknown eval mode {other:?}; expected held-out or train"),
            };
        }
        if let Some(v) = self.eta {
            config.eta = v;
        }
        if let Some(v) = self.depth {
            config.depth = v;
        }
        if self.gamma.is_some() {
            config.gamma = self.gamma;
        }
        if let Some(v) = self.c {
            config.c = v;
        }
        if let Some(v) = self.nu {
            config.nu = v;
        }
        if self.shots.is_some() {
            config.shots = self.shots;
        }
        if self.fit_on_full {
            config.fit_on_full = true;
        }
        if let Some(n_trials) = self.tune_trials {
            let mut tune = config.tune.take().unwrap_or_default();
            tune.n_trials = n_trials;
            if let Some(k) = self.k_folds {
                tune.k_folds = k;
            }
            config.tune = Some(tune);
        } else if let Some(k) = self.k_folds {
            let mut tune = config.tune.take().unwrap_or_default();
            tune.k_folds = k;
            config.tune = Some(tune);
        }
        if let Some(v) = self.estimate_profile {
            config.estimate_profile = v;
        }
        if let Some(v) = self.estimate_shots {
            config.estimate_shots = v;
        }
        if let Some(seed) = self.seed {
            config.override_seeds(seed);
        }
        Ok(config)
    }
}

#[derive(Args)]
struct EstimateArgs {
    /// Built-in profile name (sc-optimistic, sc-pessimistic, trapped-ion,
    /// photonic) or a label for --rate.
    #[arg(long, default_value = "sc-optimistic")]
    profile: String,
    /// Custom shot rate in shots per second.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, default_value_t = 500)]
    n_samples: u64,
    #[arg(long, default_value_t = 0)]
    n_queries: u64,
    #[arg(long, default_value_t = 1000)]
    shots: u64,
    /// full | triangle | linear
    #[arg(long, default_value = "triangle")]
    convention: EvalConvention,
    /// Use this evaluation count instead of the convention formula.
    #[arg(long)]
    evals: Option<u64>,
    /// Extra sample counts for the sweep CSV.
    #[arg(long, value_delimiter = ',')]
    sweep_samples: Vec<u64>,
    /// Extra shot budgets for the sweep CSV.
    #[arg(long, value_delimiter = ',')]
    sweep_shots: Vec<u64>,
    /// Write the sweep table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GramArgs {
    /// Processed dataset CSV (from `qkad ingest`).
    #[arg(long)]
    input: PathBuf,
    /// Output path for the binary matrix.
    #[arg(long)]
    output: PathBuf,
    /// Also write the matrix as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// rbf | fidelity | projected
    #[arg(long, default_value = "fidelity")]
    kernel: String,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 7)]
    interleave_seed: u64,
    #[arg(long, default_value_t = 2)]
    interleave_layers: usize,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 11)]
    shot_seed: u64,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout();
    match cli.command {
        Command::Ingest(args) => {
            let options = ingest::IngestOptions {
                input: args.input,
                output_dir: args.output_dir,
                n_nominal: args.n_nominal,
                n_fraud: args.n_fraud,
                seed: args.seed,
                scale: args.scale,
                pca: args.pca,
                eta: args.eta,
            };
            let output = ingest::run(&options)?;
            ingest::describe(&output, &mut stdout)?;
        }
        Command::Benchmark(args) => {
            let config = args.into_config()?;
            let rows = benchmark::run(&config)?;
            println!("{}", benchmark::RESULTS_HEADER);
            for row in &rows {
                println!(
                    "{},{},{},{},{},{}",
                    row.n_features,
                    row.model,
                    row.model.kernel_name(),
                    row.ap,
                    row.f1,
                    row.seconds
                );
            }
            println!("wrote {}", config.output_dir.join("results.csv").display());
        }
        Command::Tune(args) => {
            let mut config = args.into_config()?;
            if config.tune.is_none() {
                config.tune = Some(TuneConfig::default());
            }
            let output = tune::run(&config)?;
            tune::describe(&output, &mut stdout)?;
        }
        Command::Estimate(args) => {
            let options = estimate::EstimateOptions {
                profile: args.profile,
                rate: args.rate,
                n_samples: args.n_samples,
                n_queries: args.n_queries,
                shots: args.shots,
                convention: args.convention,
                evals_override: args.evals,
                sweep_samples: args.sweep_samples,
                sweep_shots: args.sweep_shots,
                csv: args.csv,
            };
            let report = estimate::run(&options)?;
            estimate::describe(&report, &options, &mut stdout)?;
        }
        Command::Gram(args) => {
            let options = gram_cmd::GramOptions {
                input: args.input,
                output: args.output,
                csv: args.csv,
                kernel: args.kernel,
                gamma: args.gamma,
                depth: args.depth,
                interleave_seed: args.interleave_seed,
                interleave_layers: args.interleave_layers,
                shots: args.shots,
                shot_seed: args.shot_seed,
            };
            let output = gram_cmd::run(&options)?;
            gram_cmd::describe(&output, &mut stdout)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(exit_code(&error) as u8)
        }
    }
}
