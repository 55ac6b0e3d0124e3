//! Ingham summation, Dirichlet series and Euler products for arithmetic
//! sequences, plus a harness that measures the associated Tauberian estimates
//! at finite scale.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod lemma;
pub mod numeric;
pub mod quad;
pub mod sequences;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
