//! The p-adic engine: exponential factors, reduction to the monomial basis,
//! and the matrices of the Frobenius maps and of the comparison map.

pub mod matrices;
pub mod oracle;
pub mod reduce;
pub mod series;

pub use matrices::{frobenius_matrix, frobenius_matrix_with_cutoff, l_polynomial_from_frobenius, transform_matrix, FrobeniusMatrix, MatrixKind};
pub use reduce::{FKind, ReductionDiagnostics, Reducer};
pub use series::TruncatedSeries;

use crate::charp::{is_nondegenerate, CohomologyBasis, GradedModel, LaurentPoly, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{Exp, NewtonPolyhedron, Q};
use crate::padic::dwork::{gamma_l_ord, DworkConstants};
use crate::padic::{Ctx, Scalar};
use std::sync::Arc;

/// Everything the p-adic computations share for one polynomial.
pub struct Setup {
    pub f: LaurentPoly,
    pub poly: Arc<NewtonPolyhedron>,
    pub model: GradedModel,
    pub basis: CohomologyBasis,
    /// K_1 = Q_q(pi): all series work happens here
    pub k1: Arc<Ctx>,
    /// K_m: normalized matrices live here
    pub km: Arc<Ctx>,
    pub dc: DworkConstants,
    /// Teichmuller lifts of the coefficients of f
    pub fhat: Vec<(Exp, Scalar)>,
    pub n_out: i64,
    /// internal target precision of the unnormalized rows
    pub n_target: i64,
}

impl Setup {
    /// Build the shared data. Fails with `Degenerate` when the char-p
    /// verdict is negative or the graded complement has the wrong size.
    pub fn new(f: &LaurentPoly, n_out: i64) -> Result<Setup> {
        if n_out < 1 {
            return Err(Error::Usage("N_out must be positive".into()));
        }
        let poly = Arc::new(NewtonPolyhedron::build(&f.support()?));
        if poly.dim != poly.n {
            return Err(Error::Domain(format!("Newton polyhedron has dimension {} < n = {}", poly.dim, poly.n)));
        }
        let model = GradedModel::new(f, poly.clone())?;
        let basis = model.compute_basis()?;
        Self::with_basis(f, poly, model, basis, n_out)
    }

    /// Like [`Setup::new`] but also runs the char-p nondegeneracy test.
    pub fn checked(f: &LaurentPoly, n_out: i64, s_bound: u32) -> Result<Setup> {
        let poly = NewtonPolyhedron::build(&f.support()?);
        if let v @ Verdict::Degenerate { .. } = is_nondegenerate(f, &poly, s_bound)? {
            return Err(Error::Degenerate(format!("{v:?}")));
        }
        Self::new(f, n_out)
    }

    fn with_basis(
        f: &LaurentPoly,
        poly: Arc<NewtonPolyhedron>,
        model: GradedModel,
        basis: CohomologyBasis,
        n_out: i64,
    ) -> Result<Setup> {
        let n = poly.n as i64;
        let p = f.p() as u64;
        // scalars keep at most max_digits(p) digits of relative precision
        let cap = crate::padic::zq::max_digits(p) as i64 - 1;
        if n_out > cap {
            return Err(Error::Precision(format!("N_out = {n_out} exceeds the {cap} digits available at p = {p}")));
        }
        let n_target = n_out + 2 * n + 2;
        let k1 = Ctx::new(p, f.a() as usize, 1, n_target + n + 4)?;
        let km = Ctx::with_ring(k1.zq.clone(), poly.m, n_out);
        let l_max = l_max_needed(p, n_target + n + 2);
        let dc = DworkConstants::new(&k1, l_max)?;
        let fhat = f.terms.iter().map(|(u, c)| (*u, k1.teichmuller(*c))).collect();
        Ok(Setup { f: f.clone(), poly, model, basis, k1, km, dc, fhat, n_out, n_target })
    }

    pub fn n(&self) -> usize {
        self.poly.n
    }

    pub fn p(&self) -> u64 {
        self.k1.p
    }

    pub fn weights(&self) -> Vec<Q> {
        self.basis.weights()
    }
}

/// Smallest L such that every term gamma_l t^{p^l} with l > L has potential
/// ord gamma_l - (p^l + 1)/(p-1) >= n, so both the comparison factors and
/// the tilde derivation can stop at L.
pub fn l_max_needed(p: u64, n: i64) -> usize {
    let mut l = 1u32;
    loop {
        let pot = gamma_l_ord(p, l) - Q::new((p as i64).pow(l) + 1, p as i64 - 1);
        if pot >= Q::from_integer(n) {
            return (l - 1).max(1) as usize;
        }
        l += 1;
    }
}
