//! Numerical laboratory for solitary waves of U(1)-invariant nonlinear
//! Klein-Gordon equations `ψ̈ = Δψ + f(ψ)`.

// `!(x < y)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boost;
pub mod error;
pub mod evolver;
pub mod formats;
pub mod functionals;
pub mod grid;
pub mod ode;
pub mod potential;
pub mod quadrature;
pub mod radial;

pub use error::{Result, SolitonError};
