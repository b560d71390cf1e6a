//! Truncated Laurent series over K_1 with growth certificates, and the
//! exponential factors used for the Frobenius and comparison matrices.
//!
//! Truncation is driven by a linear "potential" in integer units,
//! `s * m * val_units - m * w_units`-style: see [`Measure`]. Every factor
//! term has nonnegative potential and potentials are superadditive under
//! multiplication, so a product term at or above the threshold can be
//! dropped together with everything it would later be multiplied into.

use crate::error::{Error, Result};
use crate::geometry::{exp_add, exp_scale, Exp, NewtonPolyhedron, Q};
use crate::padic::dwork::artin_hasse_coeffs;
use crate::padic::{Ctx, Scalar};
use num_rational::BigRational;
use std::collections::HashMap;

/// Potential of a term c x^u: `scale * m * val(c) - w_units(u)`, where val
/// is in units of 1/(p-1) and w_units = m w(u). With scale = 1 this is
/// m(p-1) (ord c - w(u)/(p-1)); with scale = p it is m p (p-1) (ord c -
/// w(u)/(p(p-1))).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measure {
    pub scale: i64,
    pub m: i64,
}

impl Measure {
    pub fn of(&self, k: &Ctx, poly: &NewtonPolyhedron, u: &Exp, c: &Scalar) -> Option<i64> {
        k.val_units(c).map(|v| self.scale * self.m * v - poly.weight_units(u))
    }

    /// Units per ord-unit: m(p-1) * scale.
    pub fn per_ord(&self, p: u64) -> i64 {
        self.scale * self.m * (p as i64 - 1)
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub terms: HashMap<Exp, Scalar>,
    /// growth certificate ord A_u >= b w(u) + c
    pub cert: (Q, Q),
}

impl TruncatedSeries {
    pub fn one(k: &Ctx) -> TruncatedSeries {
        let mut terms = HashMap::new();
        terms.insert([0; crate::geometry::MAX_N], k.one());
        TruncatedSeries { terms, cert: (Q::from_integer(0), Q::from_integer(0)) }
    }

    /// Check ord A_u >= b w(u) + c on every retained term.
    pub fn verify(&self, k: &Ctx, poly: &NewtonPolyhedron) -> Result<()> {
        verify_cert(k, poly, self.terms.iter(), self.cert)
    }

    /// Smallest slack ord A_u - (b w(u) + c) over the retained terms.
    pub fn min_slack(&self, k: &Ctx, poly: &NewtonPolyhedron, cert: (Q, Q)) -> Option<Q> {
        self.terms
            .iter()
            .filter_map(|(u, c)| k.ord(c).map(|o| o - cert.0 * Q::new(poly.weight_units(u), poly.m) - cert.1))
            .min()
    }
}

pub fn verify_cert<'a>(
    k: &Ctx,
    poly: &NewtonPolyhedron,
    terms: impl Iterator<Item = (&'a Exp, &'a Scalar)>,
    cert: (Q, Q),
) -> Result<()> {
    for (u, c) in terms {
        if let Some(o) = k.ord(c) {
            let bound = cert.0 * Q::new(poly.weight_units(u), poly.m) + cert.1;
            if o < bound {
                return Err(Error::Verification(format!(
                    "certificate L({}, {}) violated at {:?}: ord {} < {}",
                    cert.0,
                    cert.1,
                    &u[..poly.n],
                    o,
                    bound
                )));
            }
        }
    }
    Ok(())
}

/// A one-direction factor sum_k c_k x^{k v}, given by its terms.
#[derive(Clone, Debug)]
pub struct Factor {
    pub terms: Vec<(Exp, Scalar)>,
}

/// Product of factors, dropping terms whose potential reaches `thresh`.
pub fn product(
    k: &Ctx,
    poly: &NewtonPolyhedron,
    meas: Measure,
    factors: &[Factor],
    thresh: i64,
) -> HashMap<Exp, Scalar> {
    let mut acc: HashMap<Exp, Scalar> = HashMap::new();
    acc.insert([0; crate::geometry::MAX_N], k.one());
    for f in factors {
        let mut next: HashMap<Exp, Scalar> = HashMap::with_capacity(acc.len() * 2);
        for (u, a) in acc.iter() {
            let Some(ma) = meas.of(k, poly, u, a) else { continue };
            for (v, b) in f.terms.iter() {
                let Some(mb) = meas.of(k, poly, v, b) else { continue };
                if ma + mb >= thresh {
                    continue;
                }
                let s = exp_add(u, v);
                let t = k.mul(a, b);
                match next.get_mut(&s) {
                    Some(x) => *x = k.add(x, &t),
                    None => {
                        next.insert(s, t);
                    }
                }
            }
        }
        next.retain(|u, c| meas.of(k, poly, u, c).is_some_and(|v| v < thresh));
        acc = next;
    }
    acc
}

/// Terms c^j/j! x^{j v} of exp(c x^v) until the a-priori potential bound
/// j (m (ord c - 1/(p-1)) * scale - w_units(v)) reaches `thresh`.
pub fn exp_monomial(k: &Ctx, poly: &NewtonPolyhedron, meas: Measure, c: &Scalar, v: &Exp, thresh: i64) -> Result<Factor> {
    let zero = [0; crate::geometry::MAX_N];
    let mut terms = vec![(zero, k.one())];
    let Some(vc) = k.val_units(c) else { return Ok(Factor { terms }) };
    // per-term lower bound of the potential, using ord j! <= j/(p-1)
    let rate = meas.scale * meas.m * (vc - 1) - poly.weight_units(v);
    if rate <= 0 {
        return Err(Error::Domain("exponential factor does not converge in the growth space".into()));
    }
    let mut t = k.one();
    let mut j = 1i64;
    while rate * j < thresh {
        t = k.mul(&t, c);
        t = k.mul(&t, &k.from_rational(&BigRational::new(1.into(), j.into())));
        terms.push((exp_scale(v, j as i32), t.clone()));
        j += 1;
    }
    Ok(Factor { terms })
}

/// Terms of the Artin-Hasse factor E(gamma * a * x^u) = sum e_j gamma^j a^j x^{j u}.
pub fn artin_hasse_factor(
    k: &Ctx,
    poly: &NewtonPolyhedron,
    meas: Measure,
    gamma: &Scalar,
    a: &Scalar,
    u: &Exp,
    thresh: i64,
    coeffs: &[BigRational],
) -> Result<Factor> {
    let c = k.mul(gamma, a);
    // ord(e_j c^j) >= j/(p-1): rate per j in potential units
    let rate = meas.scale * meas.m - poly.weight_units(u);
    if rate <= 0 {
        return Err(Error::Domain("Artin-Hasse factor does not converge".into()));
    }
    let mut terms = Vec::new();
    let mut pw = k.one();
    let mut j = 0i64;
    while rate * j < thresh {
        let idx = j as usize;
        if idx >= coeffs.len() {
            return Err(Error::Precision("Artin-Hasse coefficient table too short".into()));
        }
        terms.push((exp_scale(u, j as i32), k.mul(&k.from_rational(&coeffs[idx]), &pw)));
        pw = k.mul(&pw, &c);
        j += 1;
    }
    Ok(Factor { terms })
}

/// Number of Artin-Hasse coefficients needed for a factor with the given rate.
pub fn artin_hasse_table(p: u64, len: usize) -> Vec<BigRational> {
    artin_hasse_coeffs(p, len)
}

/// Coefficients lambda_0..lambda_{len-1} of exp(pi (t - t^p)) in K_1, from
/// the products of the series of exp(pi t) and exp(-pi t^p).
pub fn dwork_theta_series(k: &Ctx, len: usize) -> Vec<Scalar> {
    let p = k.p as usize;
    let pi = k.pi();
    // t_i = pi^i / i!
    let mut e = Vec::with_capacity(len);
    let mut t = k.one();
    for i in 0..len {
        if i > 0 {
            t = k.mul(&t, &pi);
            t = k.mul(&t, &k.from_rational(&BigRational::new(1.into(), (i as i64).into())));
        }
        e.push(t.clone());
    }
    let mut out = Vec::with_capacity(len);
    for kk in 0..len {
        let mut acc = k.zero();
        let mut j = 0usize;
        while p * j <= kk {
            // (-pi)^j / j! = (-1)^j e[j]
            let mut s = k.mul(&e[kk - p * j], &e[j]);
            if j % 2 == 1 {
                s = k.neg(&s);
            }
            acc = k.add(&acc, &s);
            j += 1;
        }
        out.push(acc);
    }
    out
}

/// Terms of theta(a x^u) = sum lambda_j a^j x^{j u}, with the bound
/// ord lambda_j >= j (p-1)/p^2.
pub fn theta_factor(
    k: &Ctx,
    poly: &NewtonPolyhedron,
    meas: Measure,
    lambda: &[Scalar],
    a: &Scalar,
    u: &Exp,
    thresh: i64,
) -> Result<Factor> {
    let p = k.p as i64;
    // potential of term j >= j * (scale m (p-1)^2/p^2 - w_units(u)); compared
    // after multiplying through by p^2
    let rate_p2 = meas.scale * meas.m * (p - 1) * (p - 1) - p * p * poly.weight_units(u);
    if rate_p2 <= 0 {
        return Err(Error::Domain("splitting-function factor does not converge".into()));
    }
    let mut terms = Vec::new();
    let mut pw = k.one();
    let mut j = 0i64;
    while rate_p2 * j < thresh * p * p {
        let idx = j as usize;
        if idx >= lambda.len() {
            return Err(Error::Precision("splitting-function table too short".into()));
        }
        terms.push((exp_scale(u, j as i32), k.mul(&lambda[idx], &pw)));
        pw = k.mul(&pw, a);
        j += 1;
    }
    Ok(Factor { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{exp_from, SupportSet};
    use crate::padic::dwork::theta_coeff_bound;

    #[test]
    fn theta_series_meets_bound_and_matches_exact() {
        for p in [3u64, 5] {
            let k = Ctx::new(p, 1, 1, 30).unwrap();
            let lam = dwork_theta_series(&k, 40);
            for (j, l) in lam.iter().enumerate() {
                if let Some(o) = k.ord(l) {
                    assert!(o >= theta_coeff_bound(p, j as u64), "p={p} j={j}");
                }
                let (r, c) = crate::padic::dwork::dwork_theta_coeff(p, j as u64);
                let exact = k.mul(&k.from_rational(&c), &k.pow(&k.pi(), r));
                let d = k.sub(&exact, l);
                assert!(k.ord_lb(&d) >= Q::from_integer(40), "p={p} j={j}");
            }
        }
    }

    #[test]
    fn exp_product_of_inverse_factors_is_one() {
        let k = Ctx::new(3, 1, 1, 30).unwrap();
        let poly = NewtonPolyhedron::build(&SupportSet::new(1, vec![exp_from(&[1]).unwrap(), exp_from(&[2]).unwrap()]).unwrap());
        let meas = Measure { scale: 1, m: poly.m };
        let c = k.pi_m_pow(3);
        let v = exp_from(&[1]).unwrap();
        let thresh = 30 * meas.per_ord(3);
        let f1 = exp_monomial(&k, &poly, meas, &c, &v, thresh).unwrap();
        let f2 = exp_monomial(&k, &poly, meas, &k.neg(&c), &v, thresh).unwrap();
        let prod = product(&k, &poly, meas, &[f1, f2], thresh);
        for (u, x) in prod.iter() {
            if u[0] == 0 {
                assert!(k.eq_at(x, &k.one()));
            } else {
                assert!(k.is_zero(x) || k.ord(x).unwrap() >= Q::from_integer(25), "{u:?}");
            }
        }
    }
}
