use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("functions or exponents live on different grids")]
    GridMismatch,

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("critical exponent undefined: s*p+ = {product} >= N = {dim}")]
    Supercritical { product: f64, dim: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("function is not in X0: nonzero value {value} at exterior node {node}")]
    NotInX0 { node: usize, value: f64 },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("bisection did not converge after {iterations} iterations (bracket width {width})")]
    BisectionFailed { iterations: usize, width: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error("line search failed after {halvings} halvings (residual {residual})")]
    LineSearchFailed { halvings: usize, residual: f64 },

    #[error("iteration cap {cap} reached (best residual {residual})")]
    IterationCap { cap: usize, residual: f64 },

    #[error("mountain-pass geometry not found: {0}")]
    GeometryNotFound(String),

    #[error("solver converged to a suspect point: {0}")]
    Suspect(String),
}

pub type Result<T> = std::result::Result<T, Error>;
