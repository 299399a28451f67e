use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the admissible region of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine did not reach its target accuracy.
    #[error("numerical error in {what}: {detail}")]
    Numerical { what: &'static str, detail: String },

    /// The contour cannot separate the spectrum from the cut.
    #[error("contour error: {0}")]
    Contour(String),

    /// The perturbative expansion is outside its convergence region.
    #[error("expansion refused: {0}")]
    Smallness(String),

    /// The requested combination of parameters is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical { what, detail: detail.into() }
    }

    /// A copy for reporting one shared failure at several places.
    pub(crate) fn replicate(&self) -> Self {
        match self {
            Error::Domain(s) => Error::Domain(s.clone()),
            Error::Numerical { what, detail } => Error::Numerical { what, detail: detail.clone() },
            Error::Contour(s) => Error::Contour(s.clone()),
            Error::Smallness(s) => Error::Smallness(s.clone()),
            Error::Unsupported(s) => Error::Unsupported(s.clone()),
            Error::Config(s) => Error::Config(s.clone()),
            Error::Io(e) => Error::Io(std::io::Error::new(e.kind(), e.to_string())),
            other => Error::numerical("output", other.to_string()),
        }
    }
}
