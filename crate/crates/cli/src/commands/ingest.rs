//! Ingest: load the raw fraud CSV, subsample with a controlled anomaly
//! share, optionally scale / project / rescale, and write the processed
//! dataset plus its provenance sidecar.

use std::path::{Path, PathBuf};

use qkad_core::dataset;
use qkad_core::Result;

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub n_nominal: usize,
    pub n_fraud: usize,
    pub seed: u64,
    pub scale: bool,
    pub pca: Option<usize>,
    pub eta: Option<f64>,
}

pub struct IngestOutput {
    pub csv_path: PathBuf,
    pub provenance_path: PathBuf,
    pub n_rows: usize,
    pub n_fraud: usize,
}

pub fn run(options: &IngestOptions) -> Result<IngestOutput> {
    let full = dataset::load_csv(&options.input)?;
    let mut data = dataset::subsample(&full, options.n_nominal, options.n_fraud, options.seed)?;
    if options.scale || options.pca.is_some() {
        let scaler = dataset::fit_scaler(&data)?;
        data = dataset::apply_scaler(&data, &scaler)?;
    }
    if let Some(n_components) = options.pca {
        let pca = dataset::fit_pca(&data, n_components)?;
        data = dataset::apply_pca(&data, &pca)?;
    }
    if let Some(eta) = options.eta {
        data = dataset::apply_eta(&data, eta)?;
    }

    std::fs::create_dir_all(&options.output_dir)?;
    let csv_path = options.output_dir.join("processed.csv");
    let provenance_path = options.output_dir.join("provenance.json");
    dataset::write_processed_csv(&data, std::fs::File::create(&csv_path)?)?;
    dataset::write_provenance(&data, std::fs::File::create(&provenance_path)?)?;

    let n_fraud = data
        .labels
        .as_ref()
        .map(|l| l.iter().filter(|&&x| x == 1).count())
        .unwrap_or(0);
    Ok(IngestOutput {
        csv_path,
        provenance_path,
        n_rows: data.n_rows(),
        n_fraud,
    })
}

pub fn describe(output: &IngestOutput, out: &mut impl std::io::Write) -> Result<()> {
    writeln!(
        out,
        "wrote {} ({} rows, {} fraud) and {}",
        output.csv_path.display(),
        output.n_rows,
        output.n_fraud,
        output.provenance_path.display()
    )?;
    Ok(())
}

/// Shared helper for commands that read a processed dataset back.
pub fn load_processed(path: &Path) -> Result<qkad_core::dataset::Dataset> {
    let file = std::fs::File::open(path)?;
    dataset::read_processed_csv(file)
}
