use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph has {n} vertices, exceeding the exhaustive-search budget of {budget}")]
    BudgetExceeded { n: usize, budget: usize },

    #[error("graph has {n} vertices, too many for a dense distance matrix (limit {limit})")]
    MatrixTooLarge { n: usize, limit: usize },

    #[error("no root: f_x(1) = {f_at_one} does not exceed level {level}")]
    NoRoot { f_at_one: f64, level: f64 },

    #[error("threshold undefined for x = {x}: {reason}")]
    ThresholdUndefined { x: f64, reason: &'static str },

    #[error("malformed edge list, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("level {k} exceeds graph diameter {diameter}")]
    LevelExceedsDiameter { k: u32, diameter: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
