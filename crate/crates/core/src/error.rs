use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative variance {0}")]
    NegativeVariance(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("covariance is not symmetric (max relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("covariance is not positive semi-definite (min eigenvalue {min_eigenvalue:e}, trace {trace:e})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64, trace: f64 },

    #[error("invalid activation: {0}")]
    InvalidActivation(String),

    #[error("pre-activation variance is zero; floor it before reweighting")]
    DegeneratePrior,

    #[error("effective output variance is zero (epsilon = 0 with a deterministic output)")]
    ZeroOutputVariance,

    #[error("instance {index}: {source}")]
    Instance {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid point (mu_a = {mu_a}, sigma_a2 = {sigma_a2}): {source}")]
    GridPoint {
        mu_a: f64,
        sigma_a2: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("classification requires a sigmoid activation")]
    NotSigmoid,

    #[error(
        "quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}"
    )]
    QuadratureDiverged { estimate: f64, tolerance: f64 },

    #[error("posterior normalisation constant vanished ({0:e})")]
    VanishingEvidence(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input")]
    EmptyInput,

    #[error("model file: {0}")]
    ModelFormat(String),
}
