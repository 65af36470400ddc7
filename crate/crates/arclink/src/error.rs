use thiserror::Error;

/// Errors produced by the linkage library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A non-degeneracy condition failed hard enough that the construction
    /// cannot proceed (e.g. parallel D vectors, q_20 ~ 0).
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("polynomial algebra: {0}")]
    Algebra(String),

    #[error("root finder stalled after {iterations} iterations (worst residual {residual:.3e})")]
    RootFinder { iterations: usize, residual: f64 },

    #[error("singularity: {0}")]
    Singular(String),

    #[error("unbounded orbit (energy {energy:.6e})")]
    Unbounded { energy: f64 },

    #[error("propagation failed: {0}")]
    Propagation(String),

    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
