//! Closed-form wall-clock estimates for running kernel workloads on quantum
//! hardware: evaluation counts per Gram convention, shots × rate arithmetic,
//! and a human-readable duration renderer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seconds per year used by the pretty-printer.
pub const SECONDS_PER_YEAR: f64 = 3.156e7;
const SECONDS_PER_WEEK: f64 = 604_800.0;

/// Named repetition rate (shots per second) with provenance notes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareProfile {
    pub name: String,
    pub rate: f64,
    pub notes: String,
}

impl HardwareProfile {
    pub fn custom(name: &str, rate: f64) -> Result<Self> {
        if rate <= 0.0 || !rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shot rate must be a positive finite number, got {rate}"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            rate,
            notes: "custom".to_string(),
        })
    }
}

/// The four built-in platform profiles.
pub fn builtin_profiles() -> Vec<HardwareProfile> {
    vec![
        HardwareProfile {
            name: "sc-optimistic".into(),
            rate: 1e6,
            notes: "superconducting circuits, active reset, MHz repetition".into(),
        },
        HardwareProfile {
            name: "sc-pessimistic".into(),
            rate: 1e3,
            notes: "superconducting circuits, passive reset, kHz repetition".into(),
        },
        HardwareProfile {
            name: "trapped-ion".into(),
            rate: 1e4,
            notes: "trapped ions, ~100 µs per shot including readout".into(),
        },
        HardwareProfile {
            name: "photonic".into(),
            rate: 1e10,
            notes: "photonic chips, ~100 ps photon lifetime".into(),
        },
    ]
}

/// Looks up a built-in profile; the error lists the available names.
pub fn find_profile(name: &str) -> Result<HardwareProfile> {
    let profiles = builtin_profiles();
    profiles
        .iter()
        .find(|p| p.name == name)
        .cloned()
        .ok_or_else(|| Error::UnknownProfile {
            name: name.to_string(),
            available: profiles
                .iter()
                .map(|p| p.name.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// How kernel evaluations are counted for a self-Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalConvention {
    /// N_s² evaluations (every ordered pair).
    Full,
    /// N_s (N_s − 1) / 2 evaluations (unordered pairs, unit diagonal free).
    Triangle,
    /// N_s evaluations (randomized / streaming update schemes).
    Linear,
}

impl std::str::FromStr for EvalConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(EvalConvention::Full),
            "triangle" => Ok(EvalConvention::Triangle),
            "linear" => Ok(EvalConvention::Linear),
            other => Err(Error::InvalidArgument(format!(
                "unknown eval convention {other:?}; expected full, triangle or linear"
            ))),
        }
    }
}

impl std::fmt::Display for EvalConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvalConvention::Full => "full",
            EvalConvention::Triangle => "triangle",
            EvalConvention::Linear => "linear",
        })
    }
}

/// One workload: training-set size, query count, shot budget, convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub n_samples: u64,
    pub n_queries: u64,
    pub n_shots: u64,
    pub convention: EvalConvention,
}

/// Kernel evaluations needed to build the training Gram matrix.
pub fn training_evals(spec: &WorkloadSpec) -> u64 {
    let n = spec.n_samples;
    match spec.convention {
        EvalConvention::Full => n * n,
        EvalConvention::Triangle => n * n.saturating_sub(1) / 2,
        EvalConvention::Linear => n,
    }
}

/// Kernel evaluations needed to score `n_queries` rows: N_d · N_s.
pub fn inference_evals(n_queries: u64, n_samples: u64) -> u64 {
    n_queries * n_samples
}

/// Wall-clock seconds: evaluations × shots / rate.
pub fn wall_time_seconds(evals: u64, n_shots: u64, profile: &HardwareProfile) -> f64 {
    evals as f64 * n_shots as f64 / profile.rate
}

fn round_sig3(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(2 - magnitude);
    (x * factor).round() / factor
}

/// Renders a duration in the most readable unit (ms, s, min, hours, weeks,
/// years), rounded to three significant digits.
pub fn format_duration(seconds: f64) -> String {
    let (value, unit) = if seconds < 0.1 {
        (seconds * 1e3, "ms")
    } else if seconds < 600.0 {
        (seconds, "s")
    } else if seconds < 7_200.0 {
        (seconds / 60.0, "min")
    } else if seconds < 2.0 * SECONDS_PER_WEEK {
        (seconds / 3_600.0, "hours")
    } else if seconds < 2.0 * SECONDS_PER_YEAR {
        (seconds / SECONDS_PER_WEEK, "weeks")
    } else {
        (seconds / SECONDS_PER_YEAR, "years")
    };
    format!("{} {}", round_sig3(value), unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(n: u64, convention: EvalConvention) -> WorkloadSpec {
        WorkloadSpec {
            n_samples: n,
            n_queries: 0,
            n_shots: 1000,
            convention,
        }
    }

    #[test]
    fn training_eval_counts() {
        assert_eq!(
            training_evals(&spec(500, EvalConvention::Triangle)),
            124_750
        );
        assert_eq!(
            training_evals(&spec(100_000, EvalConvention::Full)),
            10_000_000_000
        );
        assert_eq!(training_evals(&spec(1, EvalConvention::Triangle)), 0);
        assert_eq!(training_evals(&spec(1, EvalConvention::Full)), 1);
        assert_eq!(training_evals(&spec(1, EvalConvention::Linear)), 1);
    }

    #[test]
    fn inference_eval_counts() {
        assert_eq!(inference_evals(1, 500), 500);
        assert_eq!(inference_evals(0, 500), 0);
        assert_eq!(inference_evals(1, 100_000), 100_000);
    }

    #[test]
    fn wall_time_is_multiplicatively_homogeneous() {
        let profile = HardwareProfile::custom("p", 2.5e4).unwrap();
        let base = wall_time_seconds(1_000, 100, &profile);
        assert_abs_diff_eq!(
            wall_time_seconds(3_000, 100, &profile),
            3.0 * base,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            wall_time_seconds(1_000, 700, &profile),
            7.0 * base,
            epsilon = 1e-9
        );
        let faster = HardwareProfile::custom("q", 5e4).unwrap();
        assert_abs_diff_eq!(
            wall_time_seconds(1_000, 100, &faster),
            base / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn profile_lookup_lists_names_on_error() {
        assert_eq!(find_profile("trapped-ion").unwrap().rate, 1e4);
        match find_profile("foo") {
            Err(Error::UnknownProfile { available, .. }) => {
                for name in ["sc-optimistic", "sc-pessimistic", "trapped-ion", "photonic"] {
                    assert!(available.contains(name));
                }
            }
            other => panic!("expected unknown-profile error, got {other:?}"),
        }
        assert!(HardwareProfile::custom("bad", 0.0).is_err());
    }

    #[test]
    fn duration_rendering() {
        assert_eq!(format_duration(1e-2), "10 ms");
        assert_eq!(format_duration(0.5), "0.5 s");
        assert_eq!(format_duration(100.0), "100 s");
        assert_eq!(format_duration(1e3), "16.7 min");
        assert_eq!(format_duration(1e4), "2.78 hours");
        assert_eq!(format_duration(1e5), "27.8 hours");
        assert_eq!(format_duration(1e7), "16.5 weeks");
        assert_eq!(format_duration(1e9), "31.7 years");
    }
}
