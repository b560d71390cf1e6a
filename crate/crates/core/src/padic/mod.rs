//! p-adic coefficient fields.

pub mod dwork;
pub mod mont;
pub mod scalar;
pub mod zq;

pub use scalar::{Ctx, Scalar, Q};
