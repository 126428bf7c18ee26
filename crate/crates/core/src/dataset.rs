//! Ingest and preprocessing for the credit-card fraud CSV: class-controlled
//! subsampling, feature-wise standard scaling, PCA truncation, and the
//! quantum scaling prefactor. Every transform appends one provenance record
//! carrying the fitted parameters, so a pipeline can be replayed bit-for-bit
//! from provenance alone.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of anonymized features in the source schema (`V1` … `V28`).
pub const RAW_FEATURES: usize = 28;

/// Feature-wise standardization parameters (population statistics).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Fitted PCA basis: orthonormal components as columns, and the matching
/// eigenvalues of the sample covariance in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaParams {
    pub components: Array2<f64>,
    pub explained_variance: Vec<f64>,
}

/// One applied transform, with enough parameters to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Transform {
    Ingest {
        source: String,
        rows: usize,
    },
    Subsample {
        n_nominal: usize,
        n_fraud: usize,
        seed: u64,
    },
    StandardScale {
        params: ScalerParams,
    },
    Pca {
        params: PcaParams,
    },
    Eta {
        eta: f64,
    },
}

/// Row-major feature matrix with optional fraud labels (1 = fraud).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub labels: Option<Vec<u8>>,
    pub feature_names: Vec<String>,
    pub row_ids: Vec<String>,
    pub provenance: Vec<Transform>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn is_scaled(&self) -> bool {
        self.provenance
            .iter()
            .any(|t| matches!(t, Transform::StandardScale { .. }))
    }

    /// Indices of rows with the given label.
    pub fn class_indices(&self, class: u8) -> Vec<usize> {
        match &self.labels {
            Some(labels) => labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == class)
                .map(|(i, _)| i)
                .collect(),
            None => Vec::new(),
        }
    }

    /// A new dataset holding the given rows, preserving order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let features = Array2::from_shape_fn((indices.len(), self.n_features()), |(i, j)| {
            self.features[(indices[i], j)]
        });
        Dataset {
            features,
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            feature_names: self.feature_names.clone(),
            row_ids: indices.iter().map(|&i| self.row_ids[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Loads the raw fraud CSV, keeping the 28 anonymized feature columns and
/// the class label; `Time` and `Amount` are dropped.
pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Dataset> {
    let file = std::fs::File::open(&path)?;
    let source = path.as_ref().display().to_string();
    load_csv_reader(file, source)
}

fn load_csv_reader<R: Read>(reader: R, source: String) -> Result<Dataset> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let header_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim_matches('"') == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };

    let feature_names: Vec<String> = (1..=RAW_FEATURES).map(|i| format!("V{i}")).collect();
    let feature_cols: Vec<usize> = feature_names
        .iter()
        .map(|name| header_index(name))
        .collect::<Result<_>>()?;
    let class_col = header_index("Class")?;

    let mut rows: Vec<f64> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    let mut row_ids: Vec<String> = Vec::new();

    for (record_idx, record) in csv_reader.records().enumerate() {
        let record = record?;
        let row_number = record_idx + 1;
        for &col in &feature_cols {
            let field = record.get(col).ok_or_else(|| Error::BadRow {
                row: row_number,
                message: "short record".into(),
            })?;
            let value: f64 = field.trim_matches('"').parse().map_err(|e| Error::BadRow {
                row: row_number,
                message: format!("column {}: {e}", headers.get(col).unwrap_or("?")),
            })?;
            if !value.is_finite() {
                return Err(Error::BadRow {
                    row: row_number,
                    message: format!(
                        "non-finite value in column {}",
                        headers.get(col).unwrap_or("?")
                    ),
                });
            }
            rows.push(value);
        }
        let class_field = record.get(class_col).ok_or_else(|| Error::BadRow {
            row: row_number,
            message: "short record".into(),
        })?;
        let class_value: f64 =
            class_field
                .trim_matches('"')
                .parse()
                .map_err(|e| Error::BadRow {
                    row: row_number,
                    message: format!("column Class: {e}"),
                })?;
        let label = if class_value == 0.0 {
            0u8
        } else if class_value == 1.0 {
            1u8
        } else {
            return Err(Error::BadRow {
                row: row_number,
                message: format!("class must be 0 or 1, got {class_value}"),
            });
        };
        labels.push(label);
        row_ids.push(record_idx.to_string());
    }

    let n_rows = labels.len();
    let features = Array2::from_shape_vec((n_rows, RAW_FEATURES), rows)
        .map_err(|e| Error::Format(e.to_string()))?;

    Ok(Dataset {
        features,
        labels: Some(labels),
        feature_names,
        row_ids,
        provenance: vec![Transform::Ingest {
            source,
            rows: n_rows,
        }],
    })
}

/// Uniform per-class subsample without replacement, deterministic per seed.
/// Selected rows keep their original relative order.
pub fn subsample(data: &Dataset, n_nominal: usize, n_fraud: usize, seed: u64) -> Result<Dataset> {
    let labels = data
        .labels
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("subsample requires labels".into()))?;

    let nominal: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0).collect();
    let fraud: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    if n_nominal > nominal.len() {
        return Err(Error::InsufficientClass {
            class: 0,
            requested: n_nominal,
            available: nominal.len(),
        });
    }
    if n_fraud > fraud.len() {
        return Err(Error::InsufficientClass {
            class: 1,
            requested: n_fraud,
            available: fraud.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected: Vec<usize> = Vec::with_capacity(n_nominal + n_fraud);
    selected.extend(
        rand::seq::index::sample(&mut rng, nominal.len(), n_nominal)
            .into_iter()
            .map(|k| nominal[k]),
    );
    selected.extend(
        rand::seq::index::sample(&mut rng, fraud.len(), n_fraud)
            .into_iter()
            .map(|k| fraud[k]),
    );
    selected.sort_unstable();

    let mut out = data.select_rows(&selected);
    out.provenance.push(Transform::Subsample {
        n_nominal,
        n_fraud,
        seed,
    });
    Ok(out)
}

/// Fits per-feature means and population standard deviations.
pub fn fit_scaler(data: &Dataset) -> Result<ScalerParams> {
    let n = data.n_rows();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "scaler needs at least two rows".into(),
        ));
    }
    let mut means = Vec::with_capacity(data.n_features());
    let mut stds = Vec::with_capacity(data.n_features());
    for (j, column) in data.features.columns().into_iter().enumerate() {
        let mean = column.sum() / n as f64;
        let var = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        if std <= 0.0 {
            return Err(Error::ConstantFeature(data.feature_names[j].clone()));
        }
        means.push(mean);
        stds.push(std);
    }
    Ok(ScalerParams { means, stds })
}

/// Applies previously fitted scaler parameters (never re-fits).
pub fn apply_scaler(data: &Dataset, params: &ScalerParams) -> Result<Dataset> {
    if params.means.len() != data.n_features() || params.stds.len() != data.n_features() {
        return Err(Error::DimensionMismatch {
            left: params.means.len(),
            right: data.n_features(),
        });
    }
    let mut out = data.clone();
    for (j, mut column) in out.features.columns_mut().into_iter().enumerate() {
        column.mapv_inplace(|v| (v - params.means[j]) / params.stds[j]);
    }
    out.provenance.push(Transform::StandardScale {
        params: params.clone(),
    });
    Ok(out)
}

/// Fits PCA on standard-scaled data: the components are the leading
/// eigenvectors of the population covariance. The sign of each component is
/// fixed so its largest-magnitude entry is positive.
pub fn fit_pca(data: &Dataset, n_components: usize) -> Result<PcaParams> {
    if !data.is_scaled() {
        return Err(Error::NotScaled);
    }
    let (n, f) = (data.n_rows(), data.n_features());
    let achievable = f.min(n.saturating_sub(1));
    if n_components == 0 || n_components > achievable {
        return Err(Error::RankDeficient {
            requested: n_components,
            achievable,
        });
    }

    // Population covariance of the (re-centered) data.
    let means: Vec<f64> = (0..f)
        .map(|j| data.features.column(j).sum() / n as f64)
        .collect();
    let mut cov = DMatrix::zeros(f, f);
    for a in 0..f {
        for b in a..f {
            let mut acc = 0.0;
            for i in 0..n {
                acc += (data.features[(i, a)] - means[a]) * (data.features[(i, b)] - means[b]);
            }
            let value = acc / n as f64;
            cov[(a, b)] = value;
            cov[(b, a)] = value;
        }
    }

    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..f).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut components = Array2::zeros((f, n_components));
    let mut explained = Vec::with_capacity(n_components);
    for (col, &src) in order.iter().take(n_components).enumerate() {
        explained.push(eig.eigenvalues[src].max(0.0));
        let vector = eig.eigenvectors.column(src);
        let max_idx = (0..f)
            .max_by(|&a, &b| {
                vector[a]
                    .abs()
                    .partial_cmp(&vector[b].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        let sign = if vector[max_idx] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..f {
            components[(j, col)] = sign * vector[j];
        }
    }

    Ok(PcaParams {
        components,
        explained_variance: explained,
    })
}

/// Projects onto the fitted components: `X · components`.
pub fn apply_pca(data: &Dataset, params: &PcaParams) -> Result<Dataset> {
    if params.components.nrows() != data.n_features() {
        return Err(Error::DimensionMismatch {
            left: params.components.nrows(),
            right: data.n_features(),
        });
    }
    let projected = data.features.dot(&params.components);
    let n_components = params.components.ncols();
    let mut out = data.clone();
    out.features = projected;
    out.feature_names = (1..=n_components).map(|i| format!("pc{i}")).collect();
    out.provenance.push(Transform::Pca {
        params: params.clone(),
    });
    Ok(out)
}

/// Multiplies every feature by the quantum scaling prefactor.
pub fn apply_eta(data: &Dataset, eta: f64) -> Result<Dataset> {
    if eta <= 0.0 || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eta must be a positive finite number, got {eta}"
        )));
    }
    let mut out = data.clone();
    out.features.mapv_inplace(|v| v * eta);
    out.provenance.push(Transform::Eta { eta });
    Ok(out)
}

/// Replays recorded transforms onto a base dataset. `Ingest` records are
/// validated against the base rather than re-executed.
pub fn replay(base: &Dataset, transforms: &[Transform]) -> Result<Dataset> {
    let mut current = base.clone();
    for transform in transforms {
        current = match transform {
            Transform::Ingest { rows, .. } => {
                if *rows != current.n_rows() {
                    return Err(Error::Format(format!(
                        "ingest record says {rows} rows, base has {}",
                        current.n_rows()
                    )));
                }
                current
            }
            Transform::Subsample {
                n_nominal,
                n_fraud,
                seed,
            } => subsample(&current, *n_nominal, *n_fraud, *seed)?,
            Transform::StandardScale { params } => apply_scaler(&current, params)?,
            Transform::Pca { params } => apply_pca(&current, params)?,
            Transform::Eta { eta } => apply_eta(&current, *eta)?,
        };
    }
    Ok(current)
}

/// Writes the processed dataset as CSV: `row_id`, feature columns, and a
/// final `label` column when labels are present.
pub fn write_processed_csv<W: Write>(data: &Dataset, mut writer: W) -> Result<()> {
    let mut header = vec!["row_id".to_string()];
    header.extend(data.feature_names.iter().cloned());
    if data.labels.is_some() {
        header.push("label".to_string());
    }
    writeln!(writer, "{}", header.join(","))?;
    for i in 0..data.n_rows() {
        let mut fields = vec![data.row_ids[i].clone()];
        fields.extend(data.features.row(i).iter().map(|v| format!("{v}")));
        if let Some(labels) = &data.labels {
            fields.push(labels[i].to_string());
        }
        writeln!(writer, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Reads a dataset written by [`write_processed_csv`]. Provenance is not
/// stored in the CSV; load the sidecar JSON separately if needed.
#[allow(clippy::needless_range_loop)]
pub fn read_processed_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let columns: Vec<String> = headers.iter().map(str::to_string).collect();
    if columns.is_empty() || columns[0] != "row_id" {
        return Err(Error::Format("expected leading row_id column".into()));
    }
    let has_labels = columns.last().map(String::as_str) == Some("label");
    let feature_end = if has_labels {
        columns.len() - 1
    } else {
        columns.len()
    };
    let feature_names: Vec<String> = columns[1..feature_end].to_vec();

    let mut row_ids = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (record_idx, record) in csv_reader.records().enumerate() {
        let record = record?;
        let row_number = record_idx + 1;
        row_ids.push(record.get(0).unwrap_or_default().to_string());
        for col in 1..feature_end {
            let value: f64 = record
                .get(col)
                .ok_or_else(|| Error::BadRow {
                    row: row_number,
                    message: "short record".into(),
                })?
                .parse()
                .map_err(|e| Error::BadRow {
                    row: row_number,
                    message: format!("column {}: {e}", columns[col]),
                })?;
            rows.push(value);
        }
        if has_labels {
            let label: u8 = record
                .get(feature_end)
                .ok_or_else(|| Error::BadRow {
                    row: row_number,
                    message: "short record".into(),
                })?
                .parse()
                .map_err(|e| Error::BadRow {
                    row: row_number,
                    message: format!("column label: {e}"),
                })?;
            labels.push(label);
        }
    }
    let n_rows = row_ids.len();
    let features = Array2::from_shape_vec((n_rows, feature_names.len()), rows)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(Dataset {
        features,
        labels: if has_labels { Some(labels) } else { None },
        feature_names,
        row_ids,
        provenance: Vec::new(),
    })
}

/// Writes the provenance list as a JSON sidecar.
pub fn write_provenance<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &data.provenance)?;
    Ok(())
}

pub fn read_provenance<R: Read>(reader: R) -> Result<Vec<Transform>> {
    Ok(serde_json::from_reader(reader)?)
}

/// Pooled population variance of every feature entry; used by the default
/// RBF bandwidth rule γ = 1/(F · Var).
pub fn pooled_variance(features: ArrayView2<f64>) -> f64 {
    let total = features.len() as f64;
    let mean = features.sum() / total;
    features
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / total
}
