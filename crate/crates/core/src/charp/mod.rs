//! Characteristic p: Laurent polynomials over F_q, nondegeneracy and the
//! graded ring that produces the monomial basis.

pub mod graded;
pub mod nondeg;
pub mod parse;
pub mod poly;

pub use graded::{CohomologyBasis, GradedModel, Level};
pub use nondeg::{is_nondegenerate, Verdict};
pub use parse::parse_poly;
pub use poly::LaurentPoly;
