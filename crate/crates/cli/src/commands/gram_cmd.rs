//! Gram: evaluate the kernel matrix of a processed dataset and write the
//! compact binary (and optionally CSV) form.

use std::path::PathBuf;

use qkad_core::featuremap::FeatureMapConfig;
use qkad_core::gram;
use qkad_core::kernel::{projected_default_gamma, KernelConfig};
use qkad_core::workflow::default_rbf_gamma;
use qkad_core::{Error, Result};

use super::ingest::load_processed;

#[derive(Debug, Clone)]
pub struct GramOptions {
    pub input: PathBuf,
    pub output: PathBuf,
    pub csv: Option<PathBuf>,
    /// rbf | fidelity | projected
    pub kernel: String,
    pub gamma: Option<f64>,
    pub depth: usize,
    pub interleave_seed: u64,
    pub interleave_layers: usize,
    pub shots: Option<u64>,
    pub shot_seed: u64,
}

pub struct GramOutput {
    pub n_samples: usize,
    pub output: PathBuf,
}

pub fn run(options: &GramOptions) -> Result<GramOutput> {
    let data = load_processed(&options.input)?;
    let n_features = data.n_features();

    let map = FeatureMapConfig {
        n_qubits: n_features,
        depth: options.depth,
        // Processed datasets already carry the η scaling.
        eta: 1.0,
        interleave_seed: options.interleave_seed,
        interleave_layers: options.interleave_layers,
    };
    let kind = match options.kernel.as_str() {
        "rbf" => KernelConfig::rbf(match options.gamma {
            Some(g) => g,
            None => default_rbf_gamma(data.features.view())?,
        }),
        "fidelity" => KernelConfig::fidelity(map),
        "projected" => KernelConfig::projected(
            map,
            options
                .gamma
                .unwrap_or_else(|| projected_default_gamma(n_features)),
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown kernel {other:?}; expected rbf, fidelity or projected"
            )))
        }
    };
    let config = match options.shots {
        None => kind,
        Some(n) => kind.with_shots(n, options.shot_seed)?,
    };

    let matrix = gram::gram(data.features.view(), &data.row_ids, &config)?;
    if let Some(parent) = options.output.parent() {
        std::fs::create_dir_all(parent)?;
    }
    gram::write_binary(&matrix, std::fs::File::create(&options.output)?)?;
    if let Some(csv_path) = &options.csv {
        gram::write_csv(&matrix, std::fs::File::create(csv_path)?)?;
    }
    Ok(GramOutput {
        n_samples: matrix.n_samples(),
        output: options.output.clone(),
    })
}

pub fn describe(output: &GramOutput, out: &mut impl std::io::Write) -> Result<()> {
    writeln!(
        out,
        "wrote {}×{} gram matrix to {}",
        output.n_samples,
        output.n_samples,
        output.output.display()
    )?;
    Ok(())
}
