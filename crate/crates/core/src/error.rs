use thiserror::Error;

/// Errors raised by the numerical kernels and the orbit/Wigner engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series did not converge after {terms} terms (last term {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("matrix is numerically singular ({context}, condition estimate {condition:e})")]
    SingularMatrix { context: String, condition: f64 },

    #[error("commutator does not close in the basis (residual {residual:e})")]
    BasisClosure { residual: f64 },

    #[error("point outside the exponential domain: {0}")]
    Domain(String),

    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("point {0:?} has Δ ≠ 0 but matches no listed orbit")]
    UnclassifiablePoint(Vec<f64>),

    #[error("inconclusive geometry: {0}")]
    InconclusiveGeometry(String),

    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudgetExceeded(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid group model: {0}")]
    InvalidModel(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short name used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::BasisClosure { .. } => "BasisClosureError",
            Error::Domain(_) => "DomainError",
            Error::DegeneratePoint(_) => "DegeneratePoint",
            Error::NoSolution(_) => "NoSolution",
            Error::UnclassifiablePoint(_) => "UnclassifiablePoint",
            Error::InconclusiveGeometry(_) => "InconclusiveGeometry",
            Error::QuadratureBudgetExceeded(_) => "QuadratureBudgetExceeded",
            Error::GridMismatch(_) => "GridMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidModel(_) => "InvalidModel",
            Error::Format(_) => "FormatError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }

    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidModel(_)
                | Error::Format(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::GridMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
