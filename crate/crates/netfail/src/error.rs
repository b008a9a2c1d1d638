use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0} rejected")]
    SelfLoop(usize),
    #[error("seed set must be non-empty")]
    EmptySeeds,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{what} failed to converge within {iterations} iterations")]
    ConvergenceFailure { what: &'static str, iterations: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix exponential overflowed (non-finite entries)")]
    Overflow,
    #[error("matrix is not row-stochastic (row {row} sums to {sum})")]
    NotStochastic { row: usize, sum: f64 },
    #[error("state vector is not a distribution (sum {0})")]
    NotDistribution(f64),
    #[error("negative probability {value:e} below clamping threshold")]
    NegativeProbability { value: f64 },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("spanning-tree enumeration exceeded cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("graph with {n} vertices exceeds exact-chain limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
