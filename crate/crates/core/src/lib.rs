//! Discrete fractional Sobolev modulars, Luxembourg-type norms and relative
//! capacities with variable exponents on uniform grids in one and two
//! dimensions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod axioms;
pub mod capacity;
pub mod error;
pub mod exponent;
pub mod expr;
pub mod function;
pub mod grid;
pub mod modular;
pub mod norm;
pub mod report;
pub mod scenario;
pub mod summation;
pub mod trace;

pub use error::{Error, Result};
