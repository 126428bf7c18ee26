//! Quantum-kernel anomaly detection toolkit.
//!
//! The crate simulates IQP-style quantum feature maps on a dense statevector
//! backend, evaluates classical and quantum kernels into Gram matrices
//! (exact or shot-sampled), trains kernel SVMs and a logistic-regression
//! baseline, scores anomaly rankings by average precision, and estimates
//! wall-clock costs of the same workloads on quantum hardware profiles.

pub mod dataset;
pub mod error;
pub mod featuremap;
pub mod gram;
pub mod kernel;
pub mod metrics;
pub mod models;
pub mod resource;
pub mod statevector;
pub mod tuning;
pub mod workflow;

pub use error::{Error, Result};
