use thiserror::Error;

/// Errors raised while building, parsing or transforming graphs, conditions and programs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("unknown item `{0}`")]
    UnknownItem(String),

    #[error("label `{0}` is not in the alphabet")]
    UnknownLabel(String),

    #[error("not a graph morphism: {0}")]
    InvalidMorphism(String),

    #[error("morphism is not injective")]
    NotInjective,

    #[error("morphisms do not share a domain")]
    DomainMismatch,

    #[error("ill-formed condition: {0}")]
    InvalidCondition(String),

    #[error("ill-formed rule `{name}`: {reason}")]
    InvalidRule { name: String, reason: String },

    #[error("ill-formed formula: {0}")]
    InvalidFormula(String),

    #[error("condition is not in normal form: {0}")]
    NotNormalForm(String),

    #[error("set quantification over a graph with {0} items exceeds the 64-item limit")]
    TooManyItems(usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("undefined {kind} `{name}`")]
    Undefined { kind: &'static str, name: String },

    #[error("{0}")]
    Proof(String),

    #[error("exploration exceeded the budget of {0} graphs")]
    BudgetExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
