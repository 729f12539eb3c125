use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("undeclared label {0}")]
    UndeclaredLabel(String),

    #[error("invalid label {0:?}")]
    InvalidLabel(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid ball encoding at offset {offset}: {msg}")]
    Encoding { offset: usize, msg: String },

    /// Raised when an enumeration would materialize more items than allowed.
    #[error("size guard exceeded for {what}: estimated {estimate} > limit {limit}")]
    Guard {
        what: String,
        estimate: String,
        limit: u128,
    },

    #[error("ball not in table: {0}")]
    MissingEntry(String),

    #[error("algorithm error: {0}")]
    Algorithm(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn syntax(line: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            msg: msg.into(),
        }
    }

    pub fn guard(what: impl Into<String>, estimate: impl ToString, limit: u128) -> Self {
        Error::Guard {
            what: what.into(),
            estimate: estimate.to_string(),
            limit,
        }
    }

    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }
}
