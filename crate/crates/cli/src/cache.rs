//! Content-addressed Gram matrix cache. Keys hash the dataset provenance,
//! the kernel configuration, and the row ids, so a 20-qubit sweep can be
//! interrupted and resumed without recomputing finished matrices.

use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2};
use sha2::{Digest, Sha256};

use qkad_core::dataset::Transform;
use qkad_core::gram::{self, GramMatrix};
use qkad_core::kernel::KernelConfig;
use qkad_core::{Error, Result};

const CROSS_MAGIC: &[u8; 4] = b"QKGX";

fn cache_key(
    provenance: &[Transform],
    config: &KernelConfig,
    row_ids: &[String],
    extra: &str,
) -> Result<String> {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(provenance)?);
    hasher.update(serde_json::to_vec(config)?);
    hasher.update(row_ids.join("\n").as_bytes());
    hasher.update(extra.as_bytes());
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Symmetric Gram with caching; a hit reads the `QKGM` binary back.
pub fn cached_gram(
    cache_dir: Option<&Path>,
    provenance: &[Transform],
    features: ArrayView2<f64>,
    row_ids: &[String],
    config: &KernelConfig,
) -> Result<GramMatrix> {
    let path = match cache_dir {
        Some(dir) => {
            let key = cache_key(provenance, config, row_ids, "self")?;
            Some(dir.join(format!("{key}.qkgm")))
        }
        None => None,
    };
    if let Some(path) = &path {
        if path.exists() {
            let file = std::fs::File::open(path)?;
            let values = gram::read_binary(std::io::BufReader::new(file))?;
            if values.nrows() != row_ids.len() {
                return Err(Error::Format(format!(
                    "cache entry {} has {} rows, expected {}",
                    path.display(),
                    values.nrows(),
                    row_ids.len()
                )));
            }
            return Ok(GramMatrix {
                values,
                config: config.clone(),
                row_ids: row_ids.to_vec(),
            });
        }
    }
    let computed = gram::gram(features, row_ids, config)?;
    if let Some(path) = &path {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = std::fs::File::create(path)?;
        gram::write_binary(&computed, std::io::BufWriter::new(file))?;
    }
    Ok(computed)
}

fn write_cross(path: &PathBuf, values: &Array2<f64>) -> Result<()> {
    use std::io::Write;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut writer = std::io::BufWriter::new(std::fs::File::create(path)?);
    writer.write_all(CROSS_MAGIC)?;
    writer.write_all(&(values.nrows() as u32).to_le_bytes())?;
    writer.write_all(&(values.ncols() as u32).to_le_bytes())?;
    for v in values.iter() {
        writer.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_cross(path: &PathBuf) -> Result<Array2<f64>> {
    use std::io::Read;
    let mut reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic)?;
    if &magic != CROSS_MAGIC {
        return Err(Error::Format(format!(
            "bad magic {magic:?} in {}",
            path.display()
        )));
    }
    let mut buf4 = [0u8; 4];
    reader.read_exact(&mut buf4)?;
    let rows = u32::from_le_bytes(buf4) as usize;
    reader.read_exact(&mut buf4)?;
    let cols = u32::from_le_bytes(buf4) as usize;
    let mut values = Array2::zeros((rows, cols));
    let mut buf8 = [0u8; 8];
    for v in values.iter_mut() {
        reader.read_exact(&mut buf8)?;
        *v = f64::from_le_bytes(buf8);
    }
    Ok(values)
}

/// Rectangular cross-kernel matrix with caching.
#[allow(clippy::too_many_arguments)]
pub fn cached_cross(
    cache_dir: Option<&Path>,
    provenance: &[Transform],
    test_features: ArrayView2<f64>,
    test_ids: &[String],
    train_features: ArrayView2<f64>,
    train_ids: &[String],
    config: &KernelConfig,
) -> Result<Array2<f64>> {
    let path = match cache_dir {
        Some(dir) => {
            let mut ids = Vec::with_capacity(test_ids.len() + train_ids.len() + 1);
            ids.extend_from_slice(test_ids);
            ids.push("|".into());
            ids.extend_from_slice(train_ids);
            let key = cache_key(provenance, config, &ids, "cross")?;
            Some(dir.join(format!("{key}.qkgx")))
        }
        None => None,
    };
    if let Some(path) = &path {
        if path.exists() {
            let values = read_cross(path)?;
            if values.nrows() != test_features.nrows() || values.ncols() != train_features.nrows() {
                return Err(Error::Format(format!(
                    "cache entry {} has shape {:?}, expected ({}, {})",
                    path.display(),
                    values.shape(),
                    test_features.nrows(),
                    train_features.nrows()
                )));
            }
            return Ok(values);
        }
    }
    let computed = gram::gram_cross(test_features, train_features, config)?;
    if let Some(path) = &path {
        write_cross(path, &computed)?;
    }
    Ok(computed)
}
