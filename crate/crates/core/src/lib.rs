//! Probability that a given clean device is infected when `I` infected
//! devices pair off one after another with uniformly chosen partners among
//! `I + S` devices.
//!
//! Four engines compute the same quantity `P(I,S)`:
//!
//! * [`recursion::recursive_p`]: the second-order recurrence, uncached;
//! * [`recursion::memoized_p`]: the same recurrence over a [`recursion::MemoTable`];
//! * [`closed_form::closed_form_p`]: a sum over the number of
//!   infected–infected pairings, built from explicit counting formulas;
//! * [`montecarlo::estimate_p`]: seeded simulation of the pairing process.
//!
//! [`oracle`] enumerates the process exhaustively on small inputs and is the
//! ground truth the others are checked against; [`verification`] packages
//! those checks, and [`bench`] times the engines.
//!
//! The `parallel` feature (on by default) spreads grid sweeps, enumeration
//! and sampling over a rayon pool. Without it everything runs sequentially
//! and produces identical results.

pub mod bench;
pub mod closed_form;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod oracle;
pub mod parallel;
pub mod recursion;
pub mod verification;

pub use error::{Error, Result};
pub use model::Configuration;
pub use numerics::{AnyScalar, Backend, BackendKind, Exact, ExactScalar, Float, FloatScalar, Scalar};
