use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A chain, horizon or run configuration violates its preconditions.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid pair ({n1}, {n2}) for a chain of {sites} sites")]
    InvalidPair { n1: usize, n2: usize, sites: usize },

    #[error("shape mismatch: expected dimension {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// The requested computation exceeds a dense-storage budget.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Root finding failed for one Bethe quantum-number cell.
    #[error("Bethe solver failed in cell {cell}: {reason}")]
    SolverFailure { cell: String, reason: String },

    #[error("degenerate Bethe root in cell {cell}: wavefunction vanishes")]
    DegenerateRoot { cell: String },

    #[error("incomplete eigenbasis: expected {expected} states, got {got}")]
    IncompleteBasis { expected: usize, got: usize },

    /// Equivalence-subspace vectors are not orthonormal, or otherwise malformed.
    #[error("invalid subspace geometry: {0}")]
    Geometry(String),

    #[error("state or density matrix is not normalized (deviation {deviation:e})")]
    Normalization { deviation: f64 },

    #[error("density matrix has eigenvalue {0:e} below the clipping threshold")]
    NegativeEigenvalue(f64),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("no local maximum within {window} of t = {hint}")]
    PeakNotFound { hint: f64, window: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
