use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wired graph is disconnected: {0} vertices cannot reach the wiring point")]
    Disconnected(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} exceeds limit ({value} > {limit})")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("vertex {0} is not connected to the wiring point: infinite resistance")]
    InfiniteResistance(usize),

    #[error("infinite energy: flow {flow} on edge ({a},{b}) with zero conductance")]
    InfiniteEnergy { a: usize, b: usize, flow: f64 },

    #[error("Kirchhoff node rule violated at vertex {vertex}: net outflow {net}, expected {expected}")]
    NodeRule {
        vertex: usize,
        net: f64,
        expected: f64,
    },

    #[error("Rayleigh monotonicity violated: R(high)={high} > R(low)={low}")]
    RayleighViolation { low: f64, high: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {err:e})")]
    Quadrature { tol: f64, err: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
