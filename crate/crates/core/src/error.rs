use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{malformed} of {total} records malformed (over the 10% limit)")]
    TooManyMalformed { malformed: usize, total: usize },

    #[error("duplicate item {item_id}")]
    DuplicateItem { item_id: String },

    #[error("empty input")]
    EmptyInput,

    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("input is constant; statistic undefined")]
    ConstantInput,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("values must be positive, found {value}")]
    NonPositiveValue { value: f64 },

    #[error("tail too small: need {needed} observations at or above x_min, got {got}")]
    InsufficientTail { needed: usize, got: usize },

    #[error("all tail values equal x_min; exponent diverges")]
    DegenerateTail,

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("matrix dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unknown action name: {name}")]
    UnknownAction { name: String },

    #[error("class {class} has no examples")]
    MissingClass { class: usize },

    #[error("class {class}: need {needed} eligible users, have {available}")]
    InsufficientClass {
        class: usize,
        needed: usize,
        available: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
