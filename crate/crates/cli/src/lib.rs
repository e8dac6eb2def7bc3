//! Library side of the `paw` command: run a verification from a config and
//! collect its artifacts and tolerance checks.

mod commands;
pub mod config;
pub mod output;

use std::path::Path;

use thiserror::Error;

pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] paw_core::Error),
    #[error("cannot write output: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    ClockVerify,
    PovmVerify,
    UniverseEvolve,
    UniverseBorn,
    ArrowEntropy,
    ContinuumCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::ClockVerify => "clock verify",
            Self::PovmVerify => "povm verify",
            Self::UniverseEvolve => "universe evolve",
            Self::UniverseBorn => "universe born",
            Self::ArrowEntropy => "arrow entropy",
            Self::ContinuumCheck => "continuum check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Within(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost(t) => self.value <= t,
            Bound::Within(lo, hi) => self.value > lo && self.value < hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<Check>,
}

impl RunOutput {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub tolerance_scale: f64,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20240601;

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tolerance_scale: 1.0,
            seed: DEFAULT_SEED,
        }
    }
}

/// Runs a command without touching the filesystem.
pub fn execute(
    command: Command,
    config: &ExperimentConfig,
    options: &RunOptions,
) -> Result<RunOutput, CliError> {
    let scale = options.tolerance_scale;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CliError::Config(format!(
            "tolerance scale must be positive, got {scale}"
        )));
    }
    commands::dispatch(command, config, options)
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.contents)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Loads the config, computes everything, then writes the artifacts. Nothing
/// is written if loading or computing fails.
pub fn run(
    command: Command,
    config_path: &Path,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<RunOutput, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let output = execute(command, &config, options)?;
    write_artifacts(out_dir, &output.artifacts)?;
    Ok(output)
}
