//! Estimate: wall-clock cost of kernel workloads on hardware profiles, as a
//! table (human units plus raw seconds) and optionally as a sweep CSV.

use std::io::Write;
use std::path::PathBuf;

use qkad_core::resource::{
    builtin_profiles, find_profile, format_duration, inference_evals, training_evals,
    wall_time_seconds, EvalConvention, HardwareProfile, WorkloadSpec,
};
use qkad_core::Result;

#[derive(Debug, Clone)]
pub struct EstimateOptions {
    pub profile: String,
    /// Custom rate in shots per second; overrides the profile lookup.
    pub rate: Option<f64>,
    pub n_samples: u64,
    pub n_queries: u64,
    pub shots: u64,
    pub convention: EvalConvention,
    /// Overrides the computed training evaluation count.
    pub evals_override: Option<u64>,
    /// Extra sample counts / shot budgets for the sweep CSV.
    pub sweep_samples: Vec<u64>,
    pub sweep_shots: Vec<u64>,
    pub csv: Option<PathBuf>,
}

pub struct EstimateReport {
    pub profile: HardwareProfile,
    pub training_evals: u64,
    pub training_seconds: f64,
    pub inference_evals: u64,
    pub inference_seconds: f64,
}

fn resolve_profile(options: &EstimateOptions) -> Result<HardwareProfile> {
    match options.rate {
        Some(rate) => HardwareProfile::custom(&options.profile, rate),
        None => find_profile(&options.profile),
    }
}

pub fn run(options: &EstimateOptions) -> Result<EstimateReport> {
    let profile = resolve_profile(options)?;
    if options.shots < 1 {
        return Err(qkad_core::Error::InvalidArgument(
            "shot budget must be ≥ 1".into(),
        ));
    }
    let spec = WorkloadSpec {
        n_samples: options.n_samples,
        n_queries: options.n_queries,
        n_shots: options.shots,
        convention: options.convention,
    };
    let train_evals = options
        .evals_override
        .unwrap_or_else(|| training_evals(&spec));
    let infer_evals = inference_evals(spec.n_queries, spec.n_samples);

    if let Some(path) = &options.csv {
        write_sweep_csv(options, path)?;
    }

    Ok(EstimateReport {
        training_seconds: wall_time_seconds(train_evals, spec.n_shots, &profile),
        inference_seconds: wall_time_seconds(infer_evals, spec.n_shots, &profile),
        training_evals: train_evals,
        inference_evals: infer_evals,
        profile,
    })
}

/// Sweep rows over (N_s, shots) for every built-in profile.
fn write_sweep_csv(options: &EstimateOptions, path: &PathBuf) -> Result<()> {
    let mut samples = vec![options.n_samples];
    samples.extend(&options.sweep_samples);
    samples.dedup();
    let mut shot_budgets = vec![options.shots];
    shot_budgets.extend(&options.sweep_shots);
    shot_budgets.dedup();

    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut writer = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        writer,
        "n_samples,n_shots,profile,rate,convention,training_evals,training_seconds,inference_evals,inference_seconds"
    )?;
    for &n_samples in &samples {
        for &n_shots in &shot_budgets {
            for profile in builtin_profiles() {
                let spec = WorkloadSpec {
                    n_samples,
                    n_queries: options.n_queries,
                    n_shots,
                    convention: options.convention,
                };
                let train_evals = training_evals(&spec);
                let infer_evals = inference_evals(spec.n_queries, spec.n_samples);
                writeln!(
                    writer,
                    "{},{},{},{},{},{},{},{},{}",
                    n_samples,
                    n_shots,
                    profile.name,
                    profile.rate,
                    options.convention,
                    train_evals,
                    wall_time_seconds(train_evals, n_shots, &profile),
                    infer_evals,
                    wall_time_seconds(infer_evals, n_shots, &profile),
                )?;
            }
        }
    }
    Ok(())
}

pub fn describe(
    report: &EstimateReport,
    options: &EstimateOptions,
    out: &mut impl Write,
) -> Result<()> {
    writeln!(
        out,
        "profile           {} ({} shots/s) — {}",
        report.profile.name, report.profile.rate, report.profile.notes
    )?;
    writeln!(
        out,
        "workload          N_s={}, N_d={}, shots={}, convention={}",
        options.n_samples, options.n_queries, options.shots, options.convention
    )?;
    writeln!(
        out,
        "training evals    {} → {} ({} s)",
        report.training_evals,
        format_duration(report.training_seconds),
        report.training_seconds
    )?;
    writeln!(
        out,
        "inference evals   {} → {} ({} s)",
        report.inference_evals,
        format_duration(report.inference_seconds),
        report.inference_seconds
    )?;
    Ok(())
}
