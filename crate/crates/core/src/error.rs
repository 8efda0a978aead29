use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("transform undefined: {0}")]
    TransformUndefined(String),
    #[error("{theorem} inapplicable: {predicate} fails")]
    Inapplicable { theorem: String, predicate: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
