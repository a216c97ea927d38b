// NaN-rejecting checks are written as `!(x > a)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod clt_diag;
pub mod cov_bounds;
pub mod error;
pub mod ext_real;
pub mod finite_oracle;
pub mod fundamental;
pub(crate) mod optimize;
pub(crate) mod parallel;
pub mod psi;
pub mod tails;

pub use error::{Error, Result};
