use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("clock dimension must be at least 2, got {0}")]
    ClockTooSmall(usize),
    #[error("energy spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("parameter `{0}` must be finite")]
    NonFinite(&'static str),
    #[error("no Hermitian time operator exists for a POVM time basis")]
    PovmHasNoTimeOperator,
    #[error("state must be normalized (norm {0})")]
    NotNormalized(f64),
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expectation value has imaginary part {0:e}")]
    NotReal(f64),

    #[error("energies must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("at least {needed} energy levels required, got {got}")]
    TooFewLevels { needed: usize, got: usize },
    #[error("lowest common multiple of denominators exceeds 2^62; try a smaller max denominator")]
    LcmOverflow,
    #[error("max denominator must be at least 1")]
    BadMaxDenominator,
    #[error("rationalization merged levels {0} and {1}; raise the max denominator")]
    LevelsCollapsed(usize, usize),
    #[error("grid size {given} is too small, need at least {needed}")]
    GridTooSmall { given: usize, needed: usize },
    #[error("integer labels must start at 0 and increase strictly")]
    BadLabels,

    #[error("clock dimension {clock} must be at least {factor}x the system dimension {system}")]
    ClockNotLargeEnough {
        clock: usize,
        system: usize,
        factor: usize,
    },
    #[error(
        "system energy {energy} is {offset:e} away from the clock lattice (tolerance {tolerance:e}); \
         use a POVM clock for incommensurate spectra"
    )]
    Incommensurate {
        energy: f64,
        offset: f64,
        tolerance: f64,
    },
    #[error("system energy {energy} needs clock level {level}, outside 0..{dim}")]
    LevelOutOfRange { energy: f64, level: i64, dim: usize },
    #[error("system levels {0} and {1} pair with the same clock level")]
    PairingCollision(usize, usize),
    #[error("coefficients must be normalized (sum |c|^2 = {0})")]
    CoefficientsNotNormalized(f64),
    #[error("time basis does not belong to this universe's clock")]
    BasisMismatch,
    #[error("grid index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("clock reading has zero marginal probability; cannot condition")]
    ZeroMarginal,
    #[error("step size must be positive, got {0}")]
    BadStep(f64),
    #[error("bipartition {d1}x{d2} does not match system dimension {dim}")]
    BadBipartition { d1: usize, d2: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
