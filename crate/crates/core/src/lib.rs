//! Numerical engine for first moments of central derivatives L'_d(E, 1)
//! over Heegner discriminants, Gross-Zagier height sums, and diagnostics of
//! the off-diagonal error term of the approximate functional equation.
//!
//! Module map:
//! * [`numtheory`] - sieve, Mobius, Kronecker symbol, unit squares;
//! * [`curve`] - Weierstrass models, point counts, Hecke coefficients,
//!   AGM periods, symmetric-square L-values;
//! * [`heegner`] - discriminant sets, density constant, representation counts;
//! * [`afe`] - the cutoff function V and the L'_d(E, 1) evaluator;
//! * [`moments`] - moment sums, error-term decompositions, height sums;
//! * [`context`] - shared immutable per-run state;
//! * [`cli`] - batch subcommands, CSV/JSON emission.

pub mod error;
pub mod kahan;
pub mod numtheory;
pub mod special;

pub mod afe;
pub mod cli;
pub mod context;
pub mod curve;
pub mod heegner;
pub mod moments;
pub mod report;

pub use error::{Error, Result};
