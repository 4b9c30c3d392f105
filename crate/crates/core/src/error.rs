use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("Anderson vector vanishes at k = {k} (gap closes)")]
    ZeroVector { k: f64 },
    #[error("spectrum is gapless (min gap {min_gap:e})")]
    Gapless { min_gap: f64 },
    #[error("ground state is degenerate (gap {gap:e})")]
    DegenerateGroundState { gap: f64 },
    #[error("singular value {singular_value:e} lies within a factor 10 of tol {tol:e}")]
    TolAmbiguous { singular_value: f64, tol: f64 },
    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),
    #[error("matrix is not antisymmetric (deviation {0:e})")]
    NotAntisymmetric(f64),
    #[error("probabilities sum to {total} (min entry {min_p:e})")]
    NormalizationFailure { total: f64, min_p: f64 },
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("design matrix condition number {condition:e} exceeds 1e10")]
    IllConditioned { condition: f64 },
    #[error("grid spacing is not uniform at index {index}")]
    NonUniformGrid { index: usize },
    #[error("site {site} is outside the correlation source (range {range})")]
    SiteOutOfRange { site: usize, range: usize },
    #[error("{got} sites exceed the limit of {limit}")]
    TooManySites { got: usize, limit: usize },
}

impl Error {
    /// Short variant name, used by the CLI in error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::ZeroVector { .. } => "ZeroVector",
            Error::Gapless { .. } => "Gapless",
            Error::DegenerateGroundState { .. } => "DegenerateGroundState",
            Error::TolAmbiguous { .. } => "TolAmbiguous",
            Error::OddDimension(_) => "OddDimension",
            Error::NotAntisymmetric(_) => "NotAntisymmetric",
            Error::NormalizationFailure { .. } => "NormalizationFailure",
            Error::InsufficientPoints { .. } => "InsufficientPoints",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NonUniformGrid { .. } => "NonUniformGrid",
            Error::SiteOutOfRange { .. } => "SiteOutOfRange",
            Error::TooManySites { .. } => "TooManySites",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
