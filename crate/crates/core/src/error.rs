use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// A precondition on an input chain does not hold.
    #[error("contract violation in {op}: {reason}")]
    Contract { op: &'static str, reason: String },

    #[error("malformed equivalence witness: {0}")]
    MalformedWitness(String),

    #[error("parse error at line {line}: {message}")]
    TableParse { line: usize, message: String },

    #[error("data integrity error for n = {n}: table says {table}, search proves {search}")]
    Integrity { n: u64, table: u32, search: u32 },

    #[error("bound {kind} needs iota({n}) and fallback is not permitted")]
    MissingIota { kind: &'static str, n: u64 },

    #[error("chain file: {0}")]
    ChainFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        op,
        reason: reason.into(),
    }
}
