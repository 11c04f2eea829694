use thiserror::Error;

/// Errors raised by the restoration library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("infeasible: {n} robots cannot form a {k}-connected graph (need at least {} robots)", k + 1)]
    Infeasible { n: usize, k: usize },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("connectivity method {method} cannot test k = {k}")]
    UnsupportedMethod { method: &'static str, k: usize },

    #[error("graph with {n} vertices exceeds the brute-force limit of {limit}")]
    GraphTooLarge { n: usize, limit: usize },

    #[error("robots {i} and {j} coincide; relocation direction is undefined")]
    DegenerateDirection { i: usize, j: usize },

    #[error("communication graph is disconnected")]
    Disconnected,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no connected instance after {attempts} attempts (n = {n}, side = {side}, h = {h}, mean largest component = {mean_largest_component:.2})")]
    GenerationFailed {
        attempts: usize,
        n: usize,
        side: f64,
        h: f64,
        mean_largest_component: f64,
    },

    #[error("SVG rendering supports 2D instances only (got dim = {0})")]
    RenderUnsupported(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
