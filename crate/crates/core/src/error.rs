use alloc::string::String;

/// Errors reported by constructions, queries, and estimators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("sphere dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("vector has zero or non-finite norm")]
    DegenerateVector,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("points {first} and {second} coincide (linear cell indices)")]
    CoincidentPoints { first: usize, second: usize },
    #[error("point sets have different sizes: {low} vs {high} representatives")]
    SizeMismatch { low: usize, high: usize },
    #[error("point is outside ordered cell {cell} of S^{k} (violation {violation:e})")]
    CellMembership { cell: usize, k: usize, violation: f64 },
    #[error("ordered cells {first} and {second} have no common boundary")]
    IncompatibleCells { first: usize, second: usize },
    #[error("search budget must draw at least one sample")]
    EmptyBudget,
    #[error("pair is not a member of the correspondence")]
    NotInRelation,
}

pub type Result<T> = core::result::Result<T, Error>;
