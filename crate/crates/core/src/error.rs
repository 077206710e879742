use thiserror::Error;

use crate::model::Regime;

/// Invalid game parameters or decision variables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config could not be parsed: {0}")]
    Parse(String),
    #[error("{0} must be finite")]
    NotFinite(&'static str),
    #[error("{name} = {value} violates {name} in {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("{lo} = {lo_value} and {hi} = {hi_value} violate {lo} < {hi}")]
    Ordering {
        lo: &'static str,
        hi: &'static str,
        lo_value: f64,
        hi_value: f64,
    },
}

/// Errors raised by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("operation requires the {expected} regime but the config is {actual}")]
    RegimeMismatch { expected: Regime, actual: Regime },
    #[error("s = {s} is outside the interior band ({lower}, {upper}); {applies} applies instead")]
    OutsideInteriorBand {
        s: f64,
        lower: f64,
        upper: f64,
        applies: &'static str,
    },
    #[error("sweep has no feasible cells")]
    EmptySweep,
    #[error("internal error: {0}")]
    Internal(String),
}

impl GameError {
    /// True for errors caused by the caller's input rather than a solver bug.
    pub fn is_validation(&self) -> bool {
        !matches!(self, GameError::Internal(_))
    }
}
