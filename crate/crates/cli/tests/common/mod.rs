//! Shared fixtures for the CLI test suites.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Standard-normal sample via Box-Muller.
pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Synthetic dataset in the raw fraud-CSV schema (Time, V1…V28, Amount,
/// Class). Nominal rows are correlated Gaussians; fraud rows are shifted
/// along a fixed direction so detection is possible but not trivial.
pub fn synthetic_fraud_csv(n_nominal: usize, n_fraud: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_features = 28usize;

    // Column scales give the data a PCA spectrum.
    let scales: Vec<f64> = (0..n_features)
        .map(|j| 2.5 / ((j + 1) as f64).sqrt())
        .collect();
    // Fraud offset concentrated in the leading directions.
    let offsets: Vec<f64> = (0..n_features)
        .map(|j| if j < 8 { 1.8 / ((j + 1) as f64) } else { 0.0 })
        .collect();

    let mut out = String::new();
    out.push_str("\"Time\"");
    for j in 1..=n_features {
        out.push_str(&format!(",\"V{j}\""));
    }
    out.push_str(",\"Amount\",\"Class\"\n");

    let total = n_nominal + n_fraud;
    for i in 0..total {
        let is_fraud = i >= n_nominal;
        out.push_str(&format!("{i}"));
        for j in 0..n_features {
            let base = normal(&mut rng) * scales[j];
            let value = if is_fraud { base + offsets[j] } else { base };
            out.push_str(&format!(",{value:.6}"));
        }
        let amount = rng.random_range(1.0..500.0);
        out.push_str(&format!(",{amount:.2},\"{}\"\n", u8::from(is_fraud)));
    }
    out
}

/// Writes the synthetic dataset into `dir` and returns its path.
pub fn write_fixture(dir: &Path, n_nominal: usize, n_fraud: usize, seed: u64) -> PathBuf {
    let path = dir.join("creditcard.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(synthetic_fraud_csv(n_nominal, n_fraud, seed).as_bytes())
        .unwrap();
    path
}
