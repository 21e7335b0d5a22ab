//! Fisher information toolkit for parameter estimation with postselection.

// `!(x > lo)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod estimation;
pub mod fisher;
pub mod linalg;
pub mod postselection;
pub mod random;
pub mod state;
pub mod sweep;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, StateVector, C64};
pub use state::{GaussianProbe, ProbeGrid, Selection};
