use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero-norm state")]
    ZeroNorm,
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical underflow: {0}")]
    Underflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal notice that a truncated basis lost more norm than expected.
///
/// Heralded states are legitimately unnormalized, so this is reported
/// alongside results instead of aborting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationWarning {
    pub context: String,
    /// Squared norm (or weight) that the truncated representation retained.
    pub captured: f64,
    pub threshold: f64,
}

impl TruncationWarning {
    pub const DEFAULT_THRESHOLD: f64 = 1e-6;

    /// Returns a warning when `captured < 1 - threshold`.
    pub fn check(context: impl Into<String>, captured: f64, threshold: f64) -> Option<Self> {
        if captured < 1.0 - threshold {
            let w = Self {
                context: context.into(),
                captured,
                threshold,
            };
            log::warn!("{w}");
            Some(w)
        } else {
            None
        }
    }
}

impl std::fmt::Display for TruncationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: truncated basis captured {:.3e} (loss {:.3e} > {:.1e})",
            self.context,
            self.captured,
            1.0 - self.captured,
            self.threshold
        )
    }
}
