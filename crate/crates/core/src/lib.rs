//! Numerical geometry of A_k gravitational instantons built by the
//! Gibbons-Hawking ansatz, and the obstruction coefficients for Einstein
//! desingularization of orbifold points.

pub mod cli_report;
pub mod error;
pub mod exterior_calculus;
pub mod fit;
pub mod gh_space;
pub mod l2_harmonic;
pub mod obstruction;
pub mod par;
pub mod poly;
pub mod quadrature;

pub use error::{AleError, Result};
