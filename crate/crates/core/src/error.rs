use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("experiment has no columns")]
    NoColumns,

    #[error("column {column} has length {found}, expected {expected}")]
    RaggedColumns {
        column: usize,
        expected: usize,
        found: usize,
    },

    #[error("entry ({row}, {column}) is negative: {value}")]
    NegativeEntry { row: usize, column: usize, value: f64 },

    #[error("entry ({row}, {column}) is not finite")]
    NonFinite { row: usize, column: usize },

    #[error("experiments have {left} and {right} columns")]
    ColumnCountMismatch { left: usize, right: usize },

    #[error("vectors have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("column norms differ at column {column}: {left} vs {right}")]
    NormMismatch { column: usize, left: f64, right: f64 },

    #[error("column {column} has norm {norm}, expected 1")]
    NotUnitNorm { column: usize, norm: f64 },

    #[error("tensor power needs {rows} rows, cap is {cap}")]
    RowCapExceeded { rows: u128, cap: usize },

    #[error("linear program has {variables} variables and {constraints} constraints, caps are {max_variables} and {max_constraints}")]
    LpTooLarge {
        variables: usize,
        constraints: usize,
        max_variables: usize,
        max_constraints: usize,
    },

    #[error("simplex failed: {0}")]
    Numerical(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("NaN encountered in {0}")]
    NaN(&'static str),

    #[error("experiment is outside the {expected} regime (detected {found})")]
    RegimeMismatch { expected: String, found: String },

    #[error("experiment is not power universal")]
    NotPowerUniversal,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
