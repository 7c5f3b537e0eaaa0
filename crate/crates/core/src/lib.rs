#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod matrix;
pub mod od;
pub mod par;
pub mod recol;
pub mod regress;
mod seed;

pub use error::{Error, Result};
pub use matrix::Matrix;
