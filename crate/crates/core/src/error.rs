use thiserror::Error;

/// Errors raised by profile construction, energy evaluation and minimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("boundary condition violated: {0}")]
    Boundary(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("r = {0} lies outside the admissible interval")]
    OutOfDomain(f64),

    #[error("grid too coarse: {nodes} nodes, need at least {min}")]
    TooCoarse { nodes: usize, min: usize },

    #[error("degree {0} is not supported here (expected 1)")]
    Degree(i64),

    #[error("line search failed at iteration {iteration} (preconditioned gradient norm {grad_norm:e})")]
    LineSearch { iteration: usize, grad_norm: f64 },

    #[error("minimization did not converge; refusing to certify")]
    Unconverged,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
