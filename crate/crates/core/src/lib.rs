// Negated comparisons are used on purpose so that NaN arguments are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod linalg;
pub mod mc;
pub mod quadrature;
pub mod rh;
pub mod special;
pub mod validate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
