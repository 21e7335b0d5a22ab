//! Tolerance hierarchy used throughout the crate.
//!
//! Construction checks sit closest to machine precision, algebraic identities
//! one step looser, and cross-checks between physically distinct computation
//! routes looser again.

/// Validation of freshly built objects (Hermiticity, normalization).
pub const CONSTRUCTION: f64 = 1e-12;

/// Algebraic identities (reconstruction, unitarity, traces).
pub const IDENTITY: f64 = 1e-10;

/// Agreement between independent routes to the same physical quantity.
pub const PHYSICS: f64 = 1e-8;

/// Smallest `|<f|i>|` for which a weak value is defined.
pub const MIN_OVERLAP: f64 = 1e-14;

/// Smallest success probability for which the postselected state exists.
pub const MIN_SUCCESS: f64 = 1e-14;

/// Relative rank threshold on `lambda_j + lambda_k` in the SLD solve.
pub const RANK: f64 = 1e-12;

/// Round-off allowance below zero before a negative Fisher information is an error.
pub const NEGATIVE_FISHER: f64 = 1e-10;

/// Sweep rows below this success probability carry no Fisher values.
pub const SWEEP_MIN_SUCCESS: f64 = 1e-12;
