//! Exact and numeric computations on Hilbert modular surfaces of prime
//! discriminant: divisor sums, Borcherds products, Green functions and
//! arithmetic intersection numbers.

pub mod analytic;
pub mod arith;
pub mod borcherds;
pub mod characters;
pub mod divisor_sums;
pub mod error;
pub mod green;
pub mod intersection;
pub mod loglinear;
pub mod obstruction;
pub mod qseries;
pub mod quadfield;
pub mod special;

pub use error::{Error, Result};
