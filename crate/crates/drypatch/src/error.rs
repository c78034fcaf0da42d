use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("parameters outside the validity of the weakly nonlinear reduction: {0}")]
    OutOfValidity(String),

    #[error("no Turing point exists for these parameters (K >= 0)")]
    NoTuringPoint,

    #[error("no Turing onset found on the precipitation bracket [{0}, {1}]")]
    NoOnsetFound(f64, f64),

    #[error("Bessel function of kind {0:?} diverges at x = 0")]
    DomainError(crate::bessel::BesselKind),

    #[error("shooting method failed: {0}")]
    ShootingFailed(String),

    #[error("no localised ground state exists (c3 = {0} >= 0)")]
    NoGroundState(f64),

    #[error("pattern family unavailable: {0}")]
    FamilyUnavailable(String),

    #[error("invalid grid: {0}")]
    BadGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("branch is missing required landmarks: {0}")]
    MissingLandmarks(String),

    #[error("branch never approaches the uniform state (min amplitude {0:.3e})")]
    NoApproach(f64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
