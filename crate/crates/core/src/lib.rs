//! Random-choice solver for steady supersonic reacting flow past a wall with a
//! tracked strong contact discontinuity, and a quasi-one-dimensional duct model.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod gas;
pub mod numerics;
pub mod output;
pub mod quasi1d;
pub mod reaction;
pub mod riemann;
pub mod scheme;
pub mod theta;
pub mod wall;
pub mod waves;

pub use error::{Error, Result};
pub use gas::{Family, GasModel, State};
