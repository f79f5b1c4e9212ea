use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence is not graphic")]
    NotGraphic,

    #[error("demand is not bigraphic")]
    NotBigraphic,

    #[error("exhaustive check needs 2^{bits} subset pairs, above the 2^22 budget")]
    BudgetExceeded { bits: usize },

    #[error("sequence sums to {sum}, not zero")]
    NotZeroSum { sum: i64 },

    #[error("value {value} outside [-{bound}, {bound}]")]
    OutOfBound { value: i64, bound: i64 },

    #[error("ran out of unmarked type-1 gadgets while completing vertex {vertex}")]
    InsufficientGadgets { vertex: usize },

    #[error("bad unbalanced shape: {0}")]
    BadShape(String),

    #[error("sequence is not realizable: {0}")]
    NotRealizable(String),

    #[error("star decomposition stuck at uncovered vertex {0}")]
    Stuck(usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("exceptional vertex {0} has no permitted cluster")]
    Unassignable(usize),

    #[error("exceptional vertex {0} cannot be assigned without exceeding the per-cluster cap")]
    Overload(usize),

    #[error("could not cover exceptional vertex {0}")]
    CoverFailed(usize),

    #[error("component {component} does not fit (vacancies a={a}, b={b})")]
    Infeasible { component: usize, a: usize, b: usize },

    #[error("sharpness host needs an even vertex count of at least 4, got {0}")]
    BadParity(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }
}
