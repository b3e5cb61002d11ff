// negated comparisons reject NaN on purpose; index loops mirror tensor notation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod charges;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod initial_data;
pub mod positivity;
pub mod quadrature;
pub mod spin3;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
