use thiserror::Error;

pub type Result<T, E = LcdtError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LcdtError {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("spectral data was produced with a different matrix")]
    MatrixMismatch,

    #[error("resolution guard: phase increment {measured:.4} rad per step exceeds {bound:.4}")]
    Resolution { measured: f64, bound: f64 },

    #[error("cost guard: {what} with n = {n} exceeds the limit {limit} (force to override)")]
    Cost {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl LcdtError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        LcdtError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
