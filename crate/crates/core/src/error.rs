use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A backscatter device or evaluation point coincides with an AP; the
    /// free-space model diverges there.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// An argument violates an operation's contract (bad index, empty set,
    /// non-positive step, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration file or value failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// The requested geometry cannot be realized (e.g. the uncertainty
    /// region does not fit inside the coverage area).
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    /// A structured text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
