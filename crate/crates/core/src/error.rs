use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),
    #[error("axis contract violated: {0}")]
    Contract(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} needs {needed} cells, exact limit is {limit}; use Monte Carlo mode")]
    Budget { what: String, needed: u128, limit: u128 },
    #[error("premise failed: {0}")]
    Premise(String),
    #[error("cardinality of {var} is {got}, bound is {bound}")]
    Cardinality { var: &'static str, got: usize, bound: usize },
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad input rather than by resource limits.
    pub fn is_input(&self) -> bool {
        !matches!(self, Error::Budget { .. } | Error::Io(_))
    }
}
