//! Experiment configuration: one JSON object per run. Unknown keys are
//! rejected at every level.

use std::path::Path;

use paw_core::linalg::{Operator, StateVector, C64};
use serde::Deserialize;

use crate::CliError;

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for C64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(re) => C64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub clock: ClockConfig,
    #[serde(default)]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub bipartition: Option<BipartitionConfig>,
    #[serde(default)]
    pub observable: Option<Vec<Vec<ComplexValue>>>,
    /// Random observables drawn when `observable` is absent.
    #[serde(default)]
    pub random_observables: Option<usize>,
    #[serde(default)]
    pub mutual_information: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClockConfig {
    Hermitian {
        #[serde(default)]
        dim: Option<usize>,
        #[serde(default)]
        e0: Option<f64>,
        #[serde(default)]
        spacing: Option<f64>,
        #[serde(default)]
        tau0: Option<f64>,
        #[serde(default)]
        max_denominator: Option<u64>,
    },
    Povm {
        #[serde(default)]
        energies: Option<Vec<f64>>,
        #[serde(default)]
        dim: Option<usize>,
        #[serde(default)]
        grid_size: Option<usize>,
        #[serde(default)]
        alpha0: Option<f64>,
        #[serde(default)]
        max_denominator: Option<u64>,
    },
    Continuum {
        energies: Vec<f64>,
        #[serde(default)]
        nodes: Option<usize>,
        #[serde(default)]
        alpha0: Option<f64>,
        #[serde(default)]
        max_denominator: Option<u64>,
        /// Base step for the derivative table; defaults to `T / 10⁴`.
        #[serde(default)]
        step: Option<f64>,
    },
}

impl ClockConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Hermitian { .. } => "hermitian",
            Self::Povm { .. } => "povm",
            Self::Continuum { .. } => "continuum",
        }
    }

    pub fn max_denominator(&self) -> u64 {
        let value = match self {
            Self::Hermitian {
                max_denominator, ..
            }
            | Self::Povm {
                max_denominator, ..
            }
            | Self::Continuum {
                max_denominator, ..
            } => *max_denominator,
        };
        value.unwrap_or(1000)
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default)]
    pub energies: Option<Vec<f64>>,
    #[serde(default)]
    pub hamiltonian: Option<Vec<Vec<ComplexValue>>>,
    /// Amplitudes on the eigenvectors of the Hamiltonian, ascending energy.
    #[serde(default)]
    pub coefficients: Option<Vec<ComplexValue>>,
    /// Initial state in the basis the Hamiltonian is written in.
    #[serde(default)]
    pub initial_state: Option<Vec<ComplexValue>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BipartitionConfig {
    pub first: Vec<ComplexValue>,
    pub second: Vec<ComplexValue>,
}

/// Overrides for the default acceptance thresholds. All of them are
/// multiplied by `--tolerance-scale`.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub gram: Option<f64>,
    pub identity: Option<f64>,
    pub conjugacy: Option<f64>,
    pub age_rate: Option<f64>,
    pub povm_identity: Option<f64>,
    pub delta_sum: Option<f64>,
    pub constraint: Option<f64>,
    pub infidelity: Option<f64>,
    pub history: Option<f64>,
    pub born: Option<f64>,
    pub entropy: Option<f64>,
    pub quadrature: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn system(&self) -> Result<&SystemConfig, CliError> {
        self.system
            .as_ref()
            .ok_or_else(|| CliError::Config("missing `system`".into()))
    }
}

pub fn to_state(values: &[ComplexValue], what: &str) -> Result<StateVector, CliError> {
    if values.is_empty() {
        return Err(CliError::Config(format!("`{what}` is empty")));
    }
    StateVector::new(values.iter().map(|&v| v.into()).collect())
        .map_err(|e| CliError::Config(format!("`{what}`: {e}")))
}

pub fn to_operator(rows: &[Vec<ComplexValue>], what: &str) -> Result<Operator, CliError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&v| v.into()).collect())
        .collect();
    let op = Operator::from_rows(rows).map_err(|e| CliError::Config(format!("`{what}`: {e}")))?;
    op.ensure_hermitian()
        .map_err(|e| CliError::Config(format!("`{what}`: {e}")))?;
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_forms() {
        let cfg = ExperimentConfig::from_json(
            r#"{"clock": {"kind": "hermitian", "dim": 8},
                "system": {"energies": [0, 1], "coefficients": [0.6, [0, 0.8]]}}"#,
        )
        .unwrap();
        let coeffs = cfg.system.unwrap().coefficients.unwrap();
        assert_eq!(C64::from(coeffs[1]), C64::new(0.0, 0.8));
    }

    #[test]
    fn rejects_unknown_keys() {
        for text in [
            r#"{"clock": {"kind": "hermitian"}, "extra": 1}"#,
            r#"{"clock": {"kind": "hermitian", "dims": 4}}"#,
            r#"{"clock": {"kind": "hermitian"}, "system": {"energy": [0]}}"#,
            r#"{"clock": {"kind": "hermitian"}, "tolerances": {"gramm": 1}}"#,
            r#"{"clock": {"kind": "sundial"}}"#,
        ] {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn continuum_needs_energies() {
        assert!(ExperimentConfig::from_json(r#"{"clock": {"kind": "continuum"}}"#).is_err());
    }
}
