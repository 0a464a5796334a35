//! Crate-wide error type; variant names follow the per-module contracts.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("genus must be at least 2, got {0}")]
    InvalidGenus(u32),

    #[error("word represents the trivial class")]
    TrivialClass,

    #[error("canonical-form closure exceeded {0} cyclic words")]
    ClosureBudget(usize),

    #[error("holonomy construction failed: {0} (residual {1:e})")]
    ConstructionFailure(String, f64),

    #[error("matrix entry magnitude exceeded the precision cap ({0:e})")]
    PrecisionOverflow(f64),

    #[error("holonomy image is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(f64),

    #[error("crossing parameter within tolerance of a segment endpoint")]
    TangencyAmbiguity,

    #[error("catalog entry count would exceed the cap of {0}")]
    BudgetExceeded(usize),

    #[error("no pants completion inside the catalog window (got {found} of {needed})")]
    ExtensionNotFound { found: usize, needed: usize },

    #[error("required auxiliary curves fall outside the catalog window: {0}")]
    WindowTooSmall(String),

    #[error("all certified disjoint pairs satisfy the cross-ratio equality within {0:e}")]
    NoCrossRatioGap(f64),

    #[error("witness scan budget exhausted after {scanned} cells (best j={best_j}, k={best_k})")]
    BudgetExhausted { scanned: usize, best_j: i64, best_k: i64 },

    #[error("supplied bijection is not a graph automorphism: violating pair ({0}, {1})")]
    NotAutomorphism(usize, usize),

    #[error("fingerprint mismatch between equal canonical forms: {0}")]
    FingerprintMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
