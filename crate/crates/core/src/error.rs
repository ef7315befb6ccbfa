use thiserror::Error;

/// Errors raised by the linear-algebra, tensor, state and verifier layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds {bound:e}")]
    NonHermitian { deviation: f64, bound: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("ill-conditioned operator: min eigenvalue {min_eig:e} below threshold {threshold:e}")]
    IllConditioned { min_eig: f64, threshold: f64 },

    #[error("eigenvalue {min_eig:e} outside the domain of the matrix function")]
    DomainError { min_eig: f64 },

    #[error("Hilbert-space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid subsystem set: {0}")]
    InvalidSubsystems(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("ancilla dimension {ancilla} smaller than state rank {rank}")]
    AncillaTooSmall { ancilla: usize, rank: usize },

    #[error("epsilon {epsilon:e} exceeds the sufficiency threshold {threshold:e}")]
    EpsilonTooLarge { epsilon: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input shapes or
    /// arguments).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::IllConditioned { .. }
                | Error::DomainError { .. }
                | Error::NonFinite
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
