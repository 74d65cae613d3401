//! Pseudospectral solvers for the mixed fractional nonlinear Schrödinger
//! equation
//!
//! ```text
//! (−Δ)^{s1}u + (−Δ)^{s2}u + λu = |u|^{p−2}u,   0 < s2 < s1 ≤ 1,
//! ```
//!
//! on a periodic box: normalized ground states, the Pohozaev manifold,
//! Gagliardo–Nirenberg constants, split-step time evolution and blow-up
//! diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod runner;
pub mod sampling;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use exec::Execution;
pub use field::Field;
pub use functionals::{FunctionalTriple, ModelParams};
pub use grid::GridSpec;
