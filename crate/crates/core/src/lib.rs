// `!(x > 0.0)` is the NaN-rejecting form used for parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod comb;
pub mod dimacs;
pub mod error;
pub mod gf2hash;
pub mod oracle;
pub mod tables;

pub use error::{Error, Result};
