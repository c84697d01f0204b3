//! Error type shared across the crate.

/// Errors surfaced by parsing, refinement, and solving.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An interval query needed more precision than the configured cap.
    #[error("precision cap exceeded: query needed more than {cap} bits of alpha")]
    PrecisionCap {
        /// The configured hard cap, in bits.
        cap: u32,
    },

    /// A digit-file alpha ran out of fractional digits.
    #[error(
        "digit file exhausted: {needed} fractional digits required, only {available} available"
    )]
    DigitsExhausted {
        /// Digits the query needed.
        needed: usize,
        /// Digits the file provides.
        available: usize,
    },

    /// The supplied alpha description was unusable.
    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),

    /// Syntax error in an input system, with 1-based position.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        /// 1-based line of the offending token.
        line: usize,
        /// 1-based column of the offending token.
        col: usize,
        /// What went wrong, including expected-token hints.
        msg: String,
    },

    /// Case splitting exceeded the configured hard limit.
    #[error("case limit exceeded: more than {limit} cases required")]
    CaseLimit {
        /// The configured hard limit.
        limit: u64,
    },

    /// An I/O failure while loading a digit file.
    #[error("io error: {0}")]
    Io(String),

    /// The request is outside the supported fragment (for example, an
    /// expression whose linear coefficient vanishes while the expression
    /// itself does not, so no finite candidate interval exists).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
