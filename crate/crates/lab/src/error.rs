use std::fmt;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("computation failed: {0}")]
    Compute(toral_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => EXIT_CONFIG,
            _ => EXIT_INVARIANT,
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        LabError::Config(msg.to_string())
    }
}

impl From<toral_core::Error> for LabError {
    fn from(e: toral_core::Error) -> Self {
        use toral_core::Error as E;
        match e {
            // errors caused by the parameters rather than by the mathematics
            E::NotSquare
            | E::DimensionMismatch(..)
            | E::InvalidBall(_)
            | E::WindowTooCoarse { .. }
            | E::DepthTooCoarse { .. }
            | E::IncompatibleGrid(_)
            | E::InvalidGeometry(_)
            | E::InvalidElement(_)
            | E::RankTooLow { .. }
            | E::InvalidArgument(_) => LabError::Config(e.to_string()),
            other => LabError::Compute(other),
        }
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(std::io::Error::other(e))
    }
}

pub type LabResult<T> = Result<T, LabError>;
