//! Kernel-based learners trained from precomputed Gram matrices, plus an L2
//! logistic-regression baseline on raw features.
//!
//! Scoring convention: [`predict_scores`] always returns anomaly scores,
//! oriented so that higher means more anomalous (the positive class of the
//! average-precision metric). For the SVC that is the decision margin of the
//! fraud (+1) class; for the OC-SVM it is the negated decision value, since
//! negative decisions flag anomalies.

mod logreg;
mod ocsvm;
mod smo;
mod svc;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

pub use logreg::{logreg_objective, train_logreg, LogRegModel};
pub use ocsvm::{train_ocsvm, train_ocsvm_with_tol, OcSvmModel};
pub use svc::{train_svc, train_svc_with_tol, SvcModel};

use crate::error::{Error, Result};
use crate::kernel::KernelConfig;

/// The model/kernel combinations the toolkit benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Logreg,
    SvcRbf,
    SvcFidelity,
    OcsvmRbf,
    OcsvmFidelity,
    OcsvmProjected,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Logreg,
        ModelKind::SvcRbf,
        ModelKind::SvcFidelity,
        ModelKind::OcsvmRbf,
        ModelKind::OcsvmFidelity,
        ModelKind::OcsvmProjected,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::SvcRbf => "svc-rbf",
            ModelKind::SvcFidelity => "svc-fidelity",
            ModelKind::OcsvmRbf => "ocsvm-rbf",
            ModelKind::OcsvmFidelity => "ocsvm-fidelity",
            ModelKind::OcsvmProjected => "ocsvm-projected",
        }
    }

    pub fn kernel_name(&self) -> &'static str {
        match self {
            ModelKind::Logreg => "none",
            ModelKind::SvcRbf | ModelKind::OcsvmRbf => "rbf",
            ModelKind::SvcFidelity | ModelKind::OcsvmFidelity => "fidelity",
            ModelKind::OcsvmProjected => "projected",
        }
    }

    pub fn is_quantum(&self) -> bool {
        matches!(
            self,
            ModelKind::SvcFidelity | ModelKind::OcsvmFidelity | ModelKind::OcsvmProjected
        )
    }

    pub fn is_one_class(&self) -> bool {
        matches!(
            self,
            ModelKind::OcsvmRbf | ModelKind::OcsvmFidelity | ModelKind::OcsvmProjected
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown model kind {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// A trained model of any kind, for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SavedModel {
    Svc(SvcModel),
    OcSvm(OcSvmModel),
    LogReg(LogRegModel),
}

/// On-disk model file: the trained model, the kernel that built its Gram
/// matrix (absent for the linear baseline), and the training row ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub model: SavedModel,
    pub kernel: Option<KernelConfig>,
    pub train_row_ids: Vec<String>,
}

impl ModelFile {
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(file)?)
    }
}

/// Anomaly scores for a batch of rows. Kernel models take the cross-kernel
/// matrix (queries × training rows); the logistic baseline takes raw
/// features.
pub fn predict_scores(model: &SavedModel, inputs: ArrayView2<f64>) -> Result<Vec<f64>> {
    match model {
        SavedModel::Svc(m) => m.predict_scores(inputs),
        SavedModel::OcSvm(m) => m.predict_scores(inputs),
        SavedModel::LogReg(m) => m.predict_scores(inputs),
    }
}
