//! Dwork's constants: pi, gamma, the partial sums gamma_l, the Artin-Hasse
//! series and Dwork's splitting function exp(pi(t - t^p)).

use super::scalar::{ord_factorial, Ctx, Scalar, Q};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
pub struct DworkConstants {
    pub pi: Scalar,
    pub gamma: Scalar,
    /// gamma_l for l = 0..=l_max
    pub gamma_l: Vec<Scalar>,
    pub l_max: usize,
    /// number of terms I + 1 used in the defining sum of gamma
    pub terms: usize,
}

/// Smallest I with ord(gamma^{p^i}/p^i) > target for all i > I.
fn tail_index(p: u64, target: i64) -> usize {
    let mut i = 0u32;
    loop {
        let next = i + 1;
        let ord = Q::new((p as i64).pow(next), p as i64 - 1) - Q::from_integer(next as i64);
        if ord > Q::from_integer(target) {
            return i as usize;
        }
        i += 1;
    }
}

/// ord(gamma_l) = p^{l+1}/(p-1) - l - 1
pub fn gamma_l_ord(p: u64, l: u32) -> Q {
    Q::new((p as i64).pow(l + 1), p as i64 - 1) - Q::from_integer(l as i64 + 1)
}

/// Smallest l_max with ord(gamma_{l_max+1}) >= n.
pub fn l_max_for(p: u64, n: i64) -> usize {
    let mut l = 0u32;
    while gamma_l_ord(p, l + 1) < Q::from_integer(n) {
        l += 1;
    }
    l as usize
}

impl DworkConstants {
    /// Compute gamma by Newton iteration on g(x) = sum_{i<=I} x^{p^i}/p^i from
    /// x = pi, and gamma_l from the tail identity gamma_l = -sum_{i>l} gamma^{p^i}/p^i.
    pub fn new(k: &Ctx, l_max: usize) -> Result<DworkConstants> {
        let p = k.p;
        let target = k.zq.r as i64;
        let big_i = tail_index(p, target + 2).max(l_max + 1);
        let pi = k.pi();
        // powers x^{p^i}/p^i for i = 0..=I
        let terms_of = |x: &Scalar| -> Vec<Scalar> {
            let mut out = Vec::with_capacity(big_i + 1);
            let mut pw = x.clone();
            for i in 0..=big_i {
                if i > 0 {
                    pw = k.pow(&pw, p);
                }
                out.push(k.shift(&pw, -(i as i64) * k.e));
            }
            // shift by -e*i divides by (-p)^i; fix the sign
            out.iter()
                .enumerate()
                .map(|(i, t)| if i % 2 == 1 { k.neg(t) } else { t.clone() })
                .collect()
        };
        let mut gamma = pi.clone();
        let mut converged = false;
        for _ in 0..64 {
            let ts = terms_of(&gamma);
            let g = ts.iter().fold(k.zero(), |acc, t| k.add(&acc, t));
            // g'(x) = sum x^{p^i - 1}
            let mut dg = k.zero();
            let mut pw = gamma.clone();
            for i in 0..=big_i {
                if i > 0 {
                    pw = k.pow(&pw, p);
                }
                dg = k.add(&dg, &k.div(&pw, &gamma)?);
            }
            let step = k.div(&g, &dg)?;
            gamma = k.sub(&gamma, &step);
            if k.is_zero(&step) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Precision("gamma iteration did not converge".into()));
        }
        let ts = terms_of(&gamma);
        let mut gamma_l = Vec::with_capacity(l_max + 1);
        for l in 0..=l_max {
            let tail = ts[l + 1..].iter().fold(k.zero(), |acc, t| k.add(&acc, t));
            gamma_l.push(k.neg(&tail));
        }
        Ok(DworkConstants { pi, gamma, gamma_l, l_max, terms: big_i + 1 })
    }

    /// gamma_l by the partial sum sum_{i<=l} gamma^{p^i}/p^i (loses all
    /// precision beyond small l; kept as an independent check for l = 0, 1).
    pub fn gamma_l_partial(k: &Ctx, gamma: &Scalar, l: usize) -> Scalar {
        let mut acc = k.zero();
        let mut pw = gamma.clone();
        for i in 0..=l {
            if i > 0 {
                pw = k.pow(&pw, k.p);
            }
            let mut t = k.shift(&pw, -(i as i64) * k.e);
            if i % 2 == 1 {
                t = k.neg(&t);
            }
            acc = k.add(&acc, &t);
        }
        acc
    }
}

/// Artin-Hasse coefficients e_0..e_{n-1} as exact rationals:
/// k e_k = sum_{p^i <= k} e_{k - p^i}.
pub fn artin_hasse_coeffs(p: u64, n: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::zero(); n.max(1)];
    e[0] = BigRational::one();
    for kk in 1..n {
        let mut s = BigRational::zero();
        let mut pi = 1usize;
        while pi <= kk {
            s += &e[kk - pi];
            pi *= p as usize;
        }
        e[kk] = s / BigRational::from_integer(BigInt::from(kk));
    }
    e
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Coefficient of t^k in exp(pi(t - t^p)) written as pi^r * c with
/// k = (p-1)q + r, returned as (r, c).
pub fn dwork_theta_coeff(p: u64, k: u64) -> (u64, BigRational) {
    let (q, r) = (k / (p - 1), k % (p - 1));
    let mut c = BigRational::zero();
    let mut j = 0u64;
    while p * j <= k {
        let num = BigInt::from(-(p as i64)).pow((q - j) as u32) * if j % 2 == 0 { 1 } else { -1 };
        let den = factorial(k - p * j) * factorial(j);
        c += BigRational::new(num, den);
        j += 1;
    }
    (r, c)
}

/// Lower bound ord lambda_k >= k (p-1)/p^2.
pub fn theta_coeff_bound(p: u64, k: u64) -> Q {
    Q::new(k as i64 * (p as i64 - 1), (p * p) as i64)
}

/// The Artin-Hasse series evaluated at x with ord x >= 1/(p-1), summed until
/// the remaining terms have ord >= target.
pub fn artin_hasse_eval(k: &Ctx, x: &Scalar, target: i64) -> Scalar {
    let n = (target as usize + 1) * (k.p as usize - 1) + 1;
    let coeffs = artin_hasse_coeffs(k.p, n);
    let mut acc = k.zero_at(target * k.e);
    let mut pw = k.one();
    for c in coeffs.iter() {
        acc = k.add(&acc, &k.mul(&k.from_rational(c), &pw));
        pw = k.mul(&pw, x);
    }
    acc
}

/// p-th root of unity zeta = E(gamma).
pub fn zeta_from_gamma(k: &Ctx, gamma: &Scalar, target: i64) -> Scalar {
    artin_hasse_eval(k, gamma, target)
}

/// theta(1) = sum_k lambda_k, the same root of unity computed from pi alone.
pub fn zeta_from_pi(k: &Ctx, target: i64) -> Scalar {
    let p = k.p;
    let mut acc = k.zero_at(target * k.e);
    let mut kk = 0u64;
    while theta_coeff_bound(p, kk) < Q::from_integer(target) {
        let (r, c) = dwork_theta_coeff(p, kk);
        let term = k.mul(&k.from_rational(&c), &k.pow(&k.pi(), r));
        acc = k.add(&acc, &term);
        kk += 1;
    }
    acc
}

/// ord_p(k!) as a rational.
pub fn ord_fact_q(k: u64, p: u64) -> Q {
    Q::from_integer(ord_factorial(k, p) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_valuations() {
        for &(p, expect) in &[(3u64, Q::new(5, 2)), (5, Q::new(17, 4)), (7, Q::new(37, 6))] {
            let k = Ctx::new(p, 1, 1, 20).unwrap();
            let dc = DworkConstants::new(&k, 3).unwrap();
            assert_eq!(k.ord(&dc.gamma), Some(Q::new(1, p as i64 - 1)));
            assert_eq!(k.ord(&k.sub(&dc.gamma, &dc.pi)), Some(expect));
            for l in 0..=3u32 {
                assert_eq!(k.ord(&dc.gamma_l[l as usize]), Some(gamma_l_ord(p, l)), "p={p} l={l}");
            }
            // tail identity agrees with the partial sum where the latter is meaningful
            let g0 = DworkConstants::gamma_l_partial(&k, &dc.gamma, 0);
            assert!(k.eq_at(&g0, &dc.gamma_l[0]));
        }
    }

    #[test]
    fn two_routes_to_zeta_agree() {
        for p in [3u64, 5, 7] {
            let k = Ctx::new(p, 1, 1, 20).unwrap();
            let dc = DworkConstants::new(&k, 2).unwrap();
            let z1 = zeta_from_gamma(&k, &dc.gamma, 25);
            let z2 = zeta_from_pi(&k, 25);
            let diff = k.sub(&z1, &z2);
            assert!(k.ord_lb(&diff) >= Q::from_integer(24), "p={p}");
            let zp = k.pow(&z1, p);
            assert!(k.ord_lb(&k.sub(&zp, &k.one())) >= Q::from_integer(24));
            assert!(!k.eq_at(&z1, &k.one()));
        }
    }

    #[test]
    fn theta_coefficients_meet_the_bound() {
        for p in [3u64, 5, 7] {
            for kk in 0..60 {
                let (r, c) = dwork_theta_coeff(p, kk);
                if c.is_zero() {
                    continue;
                }
                let k = Ctx::new(p, 1, 1, 20).unwrap();
                let ord = k.ord(&k.from_rational(&c)).unwrap() + Q::new(r as i64, p as i64 - 1);
                assert!(ord >= theta_coeff_bound(p, kk), "p={p} k={kk}");
            }
        }
    }
}
