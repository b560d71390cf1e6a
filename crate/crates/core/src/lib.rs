pub mod error;
pub mod charp;
pub mod ff;
pub mod frobenius;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod padic;
pub mod suite;
pub mod phimod;

pub use error::{Error, Result};
