use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Error)]
pub enum HallError {
    #[error("quiver is malformed: {0}")]
    InvalidQuiver(String),

    #[error("unknown preset quiver `{0}` (expected one of a2, a3, kronecker, jordan, d4)")]
    UnknownPreset(String),

    #[error("dimension vector has {got} entries, quiver has {expected} vertices")]
    DimensionLength { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("field size {0} exceeds the supported maximum 65536")]
    FieldTooLarge(u64),

    #[error("representation space has {points} points, exceeding the budget {budget}")]
    BudgetExceeded { points: u128, budget: u64 },

    #[error("group order overflows 128 bits for dimension {0}")]
    Overflow(String),

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(u64, u64),

    #[error("class {id} does not exist at dimension {dim}")]
    UnknownClass { dim: String, id: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serre relation requires distinct loop-free vertices: {0}")]
    SerreUndefined(String),

    #[error("no consistent convention: {0}")]
    NoConsistentConvention(String),

    #[error("table failed validation: {0}")]
    InvalidTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HallError>;
