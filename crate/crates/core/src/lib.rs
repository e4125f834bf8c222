//! Fourth-order compact finite differences in space with Crank–Nicolson in
//! time for the damped Euler–Bernoulli beam
//! `EI u_xxxx + ρ u_tt + c u_t = f` on a simply supported span.

// Dense numeric kernels read more clearly with explicit indices.
#![allow(clippy::needless_range_loop, clippy::redundant_guards)]

pub mod analysis;
pub mod cli;
pub mod discretize;
mod error;
pub mod expr;
pub mod linalg;
pub mod stepper;

pub use error::{Error, Result};
