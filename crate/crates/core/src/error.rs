use thiserror::Error;

/// Errors raised by construction, local-time and analytics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The walk ended before the requested stopping time or window was reached.
    #[error("path exhausted at level {level}: needed index {needed}, walk has {available} steps")]
    PathExhausted {
        level: u32,
        needed: usize,
        available: usize,
    },

    /// Lazy extension of a level passed the configured step cap.
    #[error("step cap of {cap} exceeded while extending level {level}")]
    StepCapExceeded { level: u32, cap: usize },

    /// The Skorohod reference path ended before the requested hitting time.
    #[error("reference path exhausted after {hits} hitting times (needed {needed})")]
    ReferenceExhausted { hits: usize, needed: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("local-time kind {0} has no interpolated field")]
    UnsupportedKind(&'static str),

    #[error("site {site} has {available} visits, {needed} requested")]
    InsufficientVisits {
        site: i64,
        needed: usize,
        available: usize,
    },

    #[error("fields do not cover a common horizon: {0}")]
    HorizonMismatch(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("enumeration size {n} exceeds the limit {max}")]
    TooLarge { n: u32, max: u32 },

    #[error("unsupported lemma: {0}")]
    UnsupportedLemma(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
