use thiserror::Error;

/// Errors raised by the numerics, classical, quantum and scenario layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("matrix is not an orthogonal projector")]
    NotProjector,
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("Kraus operators do not sum to the identity")]
    InvalidChannel,
    #[error("state is not pure (rank {0})")]
    NotPure(usize),
    #[error("invalid density operator: {0}")]
    InvalidState(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid outcome space: {0}")]
    InvalidSpace(String),
    #[error("invalid likelihood: {0}")]
    InvalidLikelihood(String),
    #[error("outcome spaces differ; the assignments are not comparable")]
    SpaceMismatch,
    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),
    #[error("evidence has zero probability ({0:e}); the update is undefined")]
    ZeroEvidence(f64),
    #[error("assignments are incompatible (supports intersect trivially)")]
    Incompatible,
    #[error("assignments are not jointly compatible; the pool cannot be normalised")]
    JointlyIncompatible,
    #[error("invalid weights: {0}")]
    BadWeights(String),
    #[error("second state is not contained in the support of the first")]
    UnsupportedDecomposition,
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
