//! Crate-wide error type. Exit codes for the batch front end map from the
//! error kind: 2 for io, 3 for config, 4 for anything numeric.

use crate::solver::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("degenerate quadrature: {0}")]
    DegenerateQuadrature(String),

    #[error("coverage: {0}")]
    Coverage(String),

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("numeric: {0}")]
    Numeric(String),

    #[error("solver did not converge: {message}")]
    Convergence {
        message: String,
        report: Box<SolveReport>,
    },

    #[error("line search stalled: {message}")]
    LineSearchStall {
        message: String,
        report: Box<SolveReport>,
    },
}

impl Error {
    /// Stable machine-readable kind string, embedded in error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Config(_) => "config",
            Error::InvalidInput(_) => "invalid-input",
            Error::NotPositiveDefinite(_) => "not-positive-definite",
            Error::DegenerateQuadrature(_) => "degenerate-quadrature",
            Error::Coverage(_) => "coverage",
            Error::Mesh(_) => "mesh",
            Error::Assembly(_) => "assembly",
            Error::Overflow(_) => "overflow",
            Error::Numeric(_) => "numeric",
            Error::Convergence { .. } => "convergence",
            Error::LineSearchStall { .. } => "line-search-stall",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            Error::Config(_) | Error::InvalidInput(_) => 3,
            _ => 4,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "kind": self.kind(), "message": self.to_string() }).to_string()
    }
}
