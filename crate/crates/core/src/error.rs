use thiserror::Error;

/// Errors produced by the bound evaluators, information measures and
/// optimization routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable sets overlap on `{0}`")]
    OverlappingVariables(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("product alphabet has {0} atoms, exceeding the cap of {cap}", cap = crate::pmf::MAX_ATOMS)]
    AlphabetTooLarge(u128),

    #[error("covariance block for {{{vars}}} is singular (det = {det:e})")]
    SingularBlock { vars: String, det: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error(
        "information measure came out {0:e}, below the round-off floor; inputs are inconsistent"
    )]
    NegativeInformation(f64),

    #[error("objective not finite at {0:?}")]
    NonFiniteObjective(Vec<f64>),

    #[error("inflation factor {alpha} outside the feasible set for (P={p}, Q={q}, N={n})")]
    AlphaInfeasible { alpha: f64, p: f64, q: f64, n: f64 },

    #[error("unsupported construction: {0}")]
    Unsupported(String),

    #[error("{bound}: {message}")]
    BoundEvaluation { bound: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
