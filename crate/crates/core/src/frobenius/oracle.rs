//! Exponential sums computed by point enumeration, exactly in Z[zeta_p], and
//! the L-function assembled from them. Independent of the p-adic engine.

use crate::charp::nondeg::components;
use crate::charp::LaurentPoly;
use crate::error::{Error, Result};
use crate::ff::{Field, TABLE_LIMIT};
use crate::geometry::{Exp, NewtonPolyhedron, SupportSet, MAX_N};
use crate::padic::dwork::zeta_from_gamma;
use crate::padic::{Ctx, Scalar, Q};
use super::Setup;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

/// Largest number of points enumerated for one component and one field.
pub const ORACLE_POINT_BUDGET: u64 = 1 << 24;

/// An element of Z[zeta_p], stored in Z[x]/(x^p - 1) with the coefficient of
/// x^{p-1} kept at zero (the power basis 1, zeta, ..., zeta^{p-2}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclo {
    pub c: Vec<BigInt>,
}

impl Serialize for Cyclo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.c[..self.c.len() - 1].iter().map(|x| x.to_string()))
    }
}

impl Cyclo {
    pub fn zero(p: u64) -> Cyclo {
        Cyclo { c: vec![BigInt::zero(); p as usize] }
    }

    pub fn from_int(p: u64, v: BigInt) -> Cyclo {
        let mut z = Cyclo::zero(p);
        z.c[0] = v;
        z
    }

    /// sum_t counts[t] zeta^t
    pub fn from_counts(counts: &[u64]) -> Cyclo {
        let mut z = Cyclo { c: counts.iter().map(|&x| BigInt::from(x)).collect() };
        z.normalize();
        z
    }

    fn p(&self) -> usize {
        self.c.len()
    }

    fn normalize(&mut self) {
        let top = self.c[self.p() - 1].clone();
        if !top.is_zero() {
            for x in self.c.iter_mut() {
                *x -= &top;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        Cyclo { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        Cyclo { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let p = self.p();
        let mut c = vec![BigInt::zero(); p];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[(i + j) % p] += a * b;
                }
            }
        }
        let mut z = Cyclo { c };
        z.normalize();
        z
    }

    pub fn scale(&self, k: &BigInt) -> Cyclo {
        Cyclo { c: self.c.iter().map(|a| a * k).collect() }
    }

    /// Division by an integer, if exact.
    pub fn div_exact(&self, k: &BigInt) -> Option<Cyclo> {
        let mut c = Vec::with_capacity(self.p());
        for a in self.c.iter() {
            let (q, r) = a.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            c.push(q);
        }
        Some(Cyclo { c })
    }

    pub fn pow(&self, e: u32) -> Cyclo {
        let mut acc = Cyclo::from_int(self.p() as u64, BigInt::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Image in K under zeta -> z.
    pub fn embed(&self, k: &Ctx, zeta: &Scalar) -> Scalar {
        let mut acc = k.zero();
        let mut pw = k.one();
        for a in self.c.iter() {
            if !a.is_zero() {
                acc = k.add(&acc, &k.mul(&k.from_bigint(a), &pw));
            }
            pw = k.mul(&pw, zeta);
        }
        acc
    }

    /// Rational integer value, when the element lies in Z.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.c[1..].iter().all(|x| x.is_zero()).then(|| self.c[0].clone())
    }
}

impl std::fmt::Display for Cyclo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            parts.push(match i {
                0 => format!("{a}"),
                1 => format!("{a}*z"),
                _ => format!("{a}*z^{i}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentOracle {
    pub vars: Vec<usize>,
    pub nvol: i64,
    /// sums enumerated directly, s = 1..
    pub enumerated: Vec<Cyclo>,
    /// coefficients of L_c^{(-1)^{n_c - 1}}, trimmed
    pub poly: Vec<Cyclo>,
    /// the coefficients beyond the degree were seen to vanish for at least one s
    pub degree_checked: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub p: u64,
    pub n: usize,
    /// S_1..S_{s_max}
    pub sums: Vec<Cyclo>,
    /// coefficients [1, c_1, ..., c_d] of L^{(-1)^{n-1}}
    pub l_poly: Vec<Cyclo>,
    pub degree: usize,
    pub components: Vec<ComponentOracle>,
    pub free_vars: usize,
}

/// Counts of Tr(g(x)) over (F_{q^s}^*)^k for the terms of one component,
/// exponents restricted to `vars`.
fn enumerate(terms: &[(Vec<i64>, u32)], small: &Field, big: &Field) -> Result<Cyclo> {
    let root = big.embedding_of(small)?;
    let qm1 = big.q() - 1;
    let k = terms[0].0.len();
    let coeffs: Vec<u32> = terms.iter().map(|(_, c)| big.embed(small, root, *c)).collect();
    let mut e: Vec<u64> = vec![0; terms.len()];
    let step: Vec<Vec<u64>> =
        (0..k).map(|j| terms.iter().map(|(u, _)| u[j].rem_euclid(qm1 as i64) as u64).collect()).collect();
    let mut logs = vec![0u64; k];
    let mut counts = vec![0u64; small.p as usize];
    loop {
        let mut v = 0u32;
        for (t, c) in coeffs.iter().enumerate() {
            v = big.add(v, big.mul(*c, big.exp(e[t])));
        }
        counts[big.trace(v) as usize] += 1;
        let mut j = 0;
        loop {
            if j == k {
                return Ok(Cyclo::from_counts(&counts));
            }
            logs[j] += 1;
            for (t, s) in step[j].iter().enumerate() {
                e[t] = (e[t] + s) % qm1;
            }
            if logs[j] < qm1 {
                break;
            }
            // wrapped: the exponent contribution of x_j returned to zero
            logs[j] = 0;
            j += 1;
        }
    }
}

/// Coefficients of prod (1 - w T) from the power sums P_1..P_s (Newton).
pub fn newton_coeffs(psums: &[Cyclo], p: u64) -> Result<Vec<Cyclo>> {
    let mut c = vec![Cyclo::from_int(p, BigInt::one())];
    for kk in 1..=psums.len() {
        let mut acc = Cyclo::zero(p);
        for i in 1..=kk {
            acc = acc.add(&psums[i - 1].mul(&c[kk - i]));
        }
        let v = acc
            .neg()
            .div_exact(&BigInt::from(kk))
            .ok_or_else(|| Error::Verification(format!("Newton identity not integral at k = {kk}")))?;
        c.push(v);
    }
    Ok(c)
}

/// Power sums P_1..P_s of the reciprocal roots of a polynomial given by its
/// coefficients [1, c_1, ...].
pub fn power_sums(coeffs: &[Cyclo], s: usize, p: u64) -> Vec<Cyclo> {
    let mut out: Vec<Cyclo> = Vec::with_capacity(s);
    for kk in 1..=s {
        let ck = coeffs.get(kk).cloned().unwrap_or_else(|| Cyclo::zero(p));
        let mut acc = ck.scale(&BigInt::from(kk as i64)).neg();
        for i in 1..kk {
            if let Some(c) = coeffs.get(kk - i) {
                acc = acc.sub(&out[i - 1].mul(c));
            }
        }
        out.push(acc);
    }
    out
}

fn trim(mut v: Vec<Cyclo>) -> Vec<Cyclo> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn sign_pow(c: &Cyclo, k: usize) -> Cyclo {
    if k % 2 == 1 {
        c.neg()
    } else {
        c.clone()
    }
}

/// Exponential sums S_1..S_{s_max} and the L-function of f. The sum splits
/// over variable-disjoint components; each component's L-function is
/// determined from directly enumerated sums, and the sums of f for larger s
/// follow from the components' reciprocal roots.
pub fn char_sum_oracle(f: &LaurentPoly, s_max: usize) -> Result<OracleResult> {
    let p = f.p() as u64;
    let small = &*f.fq;
    let terms: Vec<(Exp, u32)> = f.terms.iter().map(|(u, c)| (*u, *c)).collect();
    let comps = components(&terms, f.n);
    let mut used = [false; MAX_N];
    let mut comp_out = Vec::new();
    for comp in comps.iter() {
        let vars: Vec<usize> = (0..f.n).filter(|&j| comp.iter().any(|(u, _)| u[j] != 0)).collect();
        for &j in vars.iter() {
            used[j] = true;
        }
        let k = vars.len();
        let proj: Vec<(Vec<i64>, u32)> =
            comp.iter().map(|(u, c)| (vars.iter().map(|&j| u[j] as i64).collect(), *c)).collect();
        let nvol = if k == 0 {
            0
        } else {
            let pts: Vec<Exp> = proj
                .iter()
                .map(|(u, _)| {
                    let mut e = [0; MAX_N];
                    for (i, x) in u.iter().enumerate() {
                        e[i] = *x as i32;
                    }
                    e
                })
                .collect();
            let poly = NewtonPolyhedron::build(&SupportSet::new(k, pts)?);
            if poly.dim < k {
                0
            } else {
                poly.nvol
            }
        };
        if k == 0 {
            // constant term: S = zeta^{Tr c} q^0 over a zero-dimensional torus
            return Err(Error::Unsupported("constant terms are not supported by the oracle".into()));
        }
        let want = nvol as usize + 2;
        let mut enumerated = Vec::new();
        for s in 1..=want {
            let deg = small.k as u64 * s as u64;
            let qs = (p as f64).powi(deg as i32);
            if qs > TABLE_LIMIT as f64 || (qs - 1.0).powi(k as i32) > ORACLE_POINT_BUDGET as f64 {
                break;
            }
            let big = Field::new(p as u32, small.k * s as u32)?;
            enumerated.push(enumerate(&proj, small, &big)?);
        }
        if enumerated.is_empty() {
            return Err(Error::Unsupported("component too large for exhaustive enumeration".into()));
        }
        let psums: Vec<Cyclo> = enumerated.iter().map(|x| sign_pow(x, k)).collect();
        let coeffs = newton_coeffs(&psums, p)?;
        let degree_checked = coeffs.len() > nvol as usize + 1;
        let poly = trim(coeffs);
        comp_out.push(ComponentOracle { vars, nvol, enumerated, poly, degree_checked });
    }
    let free_vars = (0..f.n).filter(|&j| !used[j]).count();
    let q = BigInt::from(p).pow(small.k);
    let mut sums = Vec::with_capacity(s_max);
    let comp_psums: Vec<Vec<Cyclo>> = comp_out.iter().map(|c| power_sums(&c.poly, s_max, p)).collect();
    for s in 1..=s_max {
        let mut acc = Cyclo::from_int(p, BigInt::one());
        for (c, ps) in comp_out.iter().zip(comp_psums.iter()) {
            let k = c.vars.len();
            let direct = c.enumerated.get(s - 1).cloned();
            acc = acc.mul(&direct.unwrap_or_else(|| sign_pow(&ps[s - 1], k)));
        }
        let qs1: BigInt = q.pow(s as u32) - 1;
        for _ in 0..free_vars {
            acc = acc.scale(&qs1);
        }
        sums.push(acc);
    }
    let psums: Vec<Cyclo> = sums.iter().map(|x| sign_pow(x, f.n)).collect();
    let l_poly = trim(newton_coeffs(&psums, p)?);
    let degree = l_poly.len() - 1;
    Ok(OracleResult { p, n: f.n, sums, l_poly, degree, components: comp_out, free_vars })
}

/// Coefficients of the oracle polynomial in K, with zeta = E(gamma).
pub fn embed_l_poly(k: &Ctx, gamma: &Scalar, poly: &[Cyclo], target: i64) -> Vec<Scalar> {
    let zeta = zeta_from_gamma(k, gamma, target);
    poly.iter().map(|c| c.embed(k, &zeta)).collect()
}

/// Smallest ord of the coefficient differences between `frob` (over K_m)
/// and the oracle polynomial; coefficients missing on either side count as
/// zero, and differences that vanish at precision count with their precision.
pub fn l_poly_agreement(setup: &Setup, frob: &[Scalar], oracle: &OracleResult) -> Q {
    let km = &*setup.km;
    let k1 = &*setup.k1;
    let target = k1.zq.r as i64;
    let emb = embed_l_poly(k1, &setup.dc.gamma, &oracle.l_poly, target);
    let len = frob.len().max(emb.len());
    let mut worst: Option<Q> = None;
    for i in 0..len {
        let a = frob.get(i).cloned().unwrap_or_else(|| km.zero());
        let b = emb.get(i).map(|x| km.embed(k1, x)).unwrap_or_else(|| km.zero());
        let d = km.sub(&a, &b);
        let o = km.ord(&d).unwrap_or_else(|| km.prec_ord(&d));
        worst = Some(worst.map_or(o, |w: Q| w.min(o)));
    }
    worst.unwrap_or(Q::from_integer(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charp::parse_poly;
    use std::sync::Arc;

    fn oracle(text: &str, p: u32, s: usize) -> OracleResult {
        let f = parse_poly(text, None, Arc::new(Field::new(p, 1).unwrap())).unwrap();
        char_sum_oracle(&f, s).unwrap()
    }

    #[test]
    fn linear_sum_is_minus_one() {
        let r = oracle("x", 5, 4);
        for s in r.sums.iter() {
            assert_eq!(s.as_integer(), Some(BigInt::from(-1)));
        }
        assert_eq!(r.degree, 1);
        assert_eq!(r.l_poly[1].as_integer(), Some(BigInt::from(-1)));
    }

    #[test]
    fn quadratic_gauss_sum_degree() {
        let r = oracle("x^2+x", 3, 6);
        assert_eq!(r.degree, 2);
        let r = oracle("x1^2+x2^2", 5, 8);
        assert_eq!(r.degree, 4);
    }

    #[test]
    fn newton_round_trip() {
        let p = 5;
        let coeffs = vec![
            Cyclo::from_int(p, BigInt::one()),
            Cyclo::from_int(p, BigInt::from(3)),
            Cyclo::from_int(p, BigInt::from(-7)),
        ];
        let ps = power_sums(&coeffs, 6, p);
        let back = trim(newton_coeffs(&ps, p).unwrap());
        assert_eq!(back, coeffs);
    }
}
