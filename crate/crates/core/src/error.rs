use thiserror::Error;

/// Errors produced by any part of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("variable index {index} out of range 1..={num_vars}")]
    IndexOutOfRange { index: usize, num_vars: usize },

    /// Malformed input. `line` is 1-based; 0 when no line applies.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("iteration budget overflows 2^63 (log2 budget {log2_budget:.3}); set max_iterations")]
    BudgetOverflow { log2_budget: f64 },

    #[error("instance too large for enumeration: n = {num_vars} exceeds cap {cap}")]
    Size { num_vars: usize, cap: usize },
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
