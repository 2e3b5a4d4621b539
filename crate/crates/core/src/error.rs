use thiserror::Error;

/// Errors produced by the numerical pipeline.
///
/// Variant names are stable: the CLI prints them verbatim as the machine
/// readable `kind` of a failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("formal composition requires an inner series with zero constant term (got {0})")]
    FormalCompositionRequiresZeroConstant(f64),

    #[error("{op} requires a positive constant term (got {value})")]
    NonPositiveConstantTerm { op: &'static str, value: f64 },

    #[error("offspring mean {0} is not in (0, 1)")]
    NotSubcritical(f64),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("iteration did not converge after {iterations} steps (sup delta {sup_delta:e})")]
    NoConvergence { iterations: usize, sup_delta: f64 },

    #[error("band sum does not decay towards {direction} after {bands} bands")]
    BandSumDiverging { direction: &'static str, bands: usize },

    #[error("alpha = {alpha} outside the admissible range {range}")]
    OutOfRangeAlpha { alpha: f64, range: &'static str },

    #[error("closed form {kind} is not defined for alpha = {alpha}")]
    KindAlphaMismatch { kind: &'static str, alpha: f64 },

    #[error("only {points} lattice points fall in the recovery window (need at least 10)")]
    InsufficientSupport { points: usize },

    #[error("quadrature failed near z = {z}: {reason}")]
    QuadratureFailure { z: f64, reason: String },

    #[error("cannot normalise the zero measure")]
    ZeroMass,

    #[error("tail mass {deficit:e} left uncovered by the sampling tables")]
    TailMassTooLarge { deficit: f64 },

    #[error("no surviving paths out of {paths}")]
    NoSurvivors { paths: u64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// The variant name, used as the `kind` field of CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "NonFinite",
            Error::FormalCompositionRequiresZeroConstant(_) => "FormalCompositionRequiresZeroConstant",
            Error::NonPositiveConstantTerm { .. } => "NonPositiveConstantTerm",
            Error::NotSubcritical(_) => "NotSubcritical",
            Error::InvalidPmf(_) => "InvalidPmf",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::BandSumDiverging { .. } => "BandSumDiverging",
            Error::OutOfRangeAlpha { .. } => "OutOfRangeAlpha",
            Error::KindAlphaMismatch { .. } => "KindAlphaMismatch",
            Error::InsufficientSupport { .. } => "InsufficientSupport",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::ZeroMass => "ZeroMass",
            Error::TailMassTooLarge { .. } => "TailMassTooLarge",
            Error::NoSurvivors { .. } => "NoSurvivors",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidSpec(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
