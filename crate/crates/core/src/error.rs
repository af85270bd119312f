use thiserror::Error;

/// Errors raised by the library. Failure values that are part of the algebra
/// (the empty groupoid element, the empty weight) are not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("graph has no edges, so no labeling set exists")]
    NoEdges,

    #[error("labeling error: {0}")]
    Labeling(String),

    #[error("label {label} out of range 1..={max}")]
    LabelOutOfRange { label: i64, max: u32 },

    #[error("budget exceeded: {what} limit of {limit}")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation undefined on the empty element")]
    EmptyOperand,

    #[error("partition sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("not a noncrossing partition: {0}")]
    NotNoncrossing(String),
}

pub type Result<T> = std::result::Result<T, Error>;
