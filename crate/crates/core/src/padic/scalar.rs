//! Elements of K_m = K_0(pi_m) with pi_m^{m(p-1)} = -p, in capped relative
//! precision.
//!
//! A nonzero scalar is pi_m^val * U where U = sum_{j<e} u_j pi_m^j, e = m(p-1),
//! u_j in Z_q / p^R and U a unit. `prec` is the absolute precision in
//! pi_m-units: the value is known modulo pi_m^prec. Zero at precision is
//! represented by an empty digit vector with `val == prec`.

use super::zq::ZqRing;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use smallvec::{smallvec, SmallVec};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

pub type Q = Ratio<i64>;

/// Precision marker for exact values.
pub const PREC_INF: i64 = i64::MAX / 8;

static NEXT_ID: AtomicU32 = AtomicU32::new(1);

type Digits = SmallVec<[u128; 6]>;

#[derive(Clone, Debug)]
pub struct Scalar {
    val: i64,
    prec: i64,
    d: Digits,
    ctx: u32,
}

#[derive(Debug)]
pub struct Ctx {
    pub zq: Arc<ZqRing>,
    pub p: u64,
    pub a: usize,
    pub m: i64,
    /// ramification index over Q_p, m(p-1)
    pub e: i64,
    /// working precision target in ord units (p-adic digits)
    pub n_work: i64,
    id: u32,
    p_m: u128,
}

impl Ctx {
    pub fn new(p: u64, a: usize, m: i64, n_work: i64) -> Result<Arc<Ctx>> {
        if m < 1 || n_work < 1 {
            return Err(Error::Usage("m and N_work must be positive".into()));
        }
        let zq = Arc::new(ZqRing::new(p, a)?);
        Ok(Self::with_ring(zq, m, n_work))
    }

    /// A context sharing the unramified ring of `zq`.
    pub fn with_ring(zq: Arc<ZqRing>, m: i64, n_work: i64) -> Arc<Ctx> {
        let p = zq.p;
        let a = zq.a;
        let p_m = zq.mt.to_mont(p as u128);
        Arc::new(Ctx {
            zq,
            p,
            a,
            m,
            e: m * (p as i64 - 1),
            n_work,
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            p_m,
        })
    }

    /// Relative precision capacity in pi_m-units.
    pub fn rel_cap(&self) -> i64 {
        self.e * self.zq.r as i64
    }

    fn len(&self) -> usize {
        self.e as usize * self.a
    }

    #[inline]
    fn check(&self, x: &Scalar) {
        assert_eq!(x.ctx, self.id, "scalar used with a foreign field context");
    }

    pub fn owns(&self, x: &Scalar) -> bool {
        x.ctx == self.id
    }

    // ---- raw ring operations on digit vectors (Z_q[pi_m]/(pi_m^e + p)) ----

    fn raw_mul(&self, x: &[u128], y: &[u128]) -> Digits {
        let e = self.e as usize;
        let a = self.a;
        let zq = &self.zq;
        let mt = &zq.mt;
        let mut full: SmallVec<[u128; 12]> = smallvec![0; (2 * e - 1) * a];
        if a == 1 {
            for i in 0..e {
                let xi = x[i];
                if xi == 0 {
                    continue;
                }
                for j in 0..e {
                    full[i + j] = mt.add(full[i + j], mt.mul(xi, y[j]));
                }
            }
        } else {
            for i in 0..e {
                let xi = &x[i * a..(i + 1) * a];
                if xi.iter().all(|&c| c == 0) {
                    continue;
                }
                for j in 0..e {
                    zq.mul_acc(&mut full[(i + j) * a..(i + j + 1) * a], xi, &y[j * a..(j + 1) * a]);
                }
            }
        }
        let mut out: Digits = SmallVec::from_slice(&full[..e * a]);
        // pi^{e+k} = -p pi^k
        for k in 0..e - 1 {
            for c in 0..a {
                let t = full[(e + k) * a + c];
                if t != 0 {
                    let pt = mt.mul(t, self.p_m);
                    out[k * a + c] = mt.sub(out[k * a + c], pt);
                }
            }
        }
        out
    }

    /// Multiply by pi_m^k, k >= 0.
    fn raw_shift(&self, x: &[u128], k: i64) -> Digits {
        let e = self.e;
        let a = self.a;
        let mt = &self.zq.mt;
        let (q, r) = (k / e, (k % e) as usize);
        let len = self.len();
        if q >= self.zq.r as i64 {
            return smallvec![0; len];
        }
        let negp = mt.neg(self.p_m);
        let scale = if q > 0 { mt.pow(negp, q as u128) } else { mt.one() };
        let mut out: Digits = smallvec![0; len];
        let e = e as usize;
        for j in 0..e {
            for c in 0..a {
                let mut v = x[j * a + c];
                if v == 0 {
                    continue;
                }
                if q > 0 {
                    v = mt.mul(v, scale);
                }
                let pos = j + r;
                if pos < e {
                    out[pos * a + c] = v;
                } else {
                    out[(pos - e) * a + c] = mt.mul(v, negp);
                }
            }
        }
        out
    }

    /// pi_m-adic valuation of a digit vector (None if zero mod p^R).
    fn raw_val(&self, x: &[u128]) -> Option<i64> {
        let a = self.a;
        let r = self.zq.r;
        let mut best: Option<i64> = None;
        for j in 0..self.e as usize {
            let vp = self.zq.vp(&x[j * a..(j + 1) * a]);
            if vp >= r {
                continue;
            }
            let t = self.e * vp as i64 + j as i64;
            best = Some(best.map_or(t, |b: i64| b.min(t)));
            if t == 0 {
                break;
            }
        }
        best
    }

    /// Divide by pi_m^t where t does not exceed the valuation.
    fn raw_div_pi(&self, x: &[u128], t: i64) -> Digits {
        let e = self.e as usize;
        let a = self.a;
        let mt = &self.zq.mt;
        let (q, r) = (t / self.e, t % self.e);
        let mut cur: Digits = if q > 0 {
            // pi^{qe} = (-p)^q
            let d = (self.p as u128).pow(q as u32);
            x.iter().map(|&v| if q % 2 == 0 { v / d } else { mt.neg(v / d) }).collect()
        } else {
            SmallVec::from_slice(x)
        };
        for _ in 0..r {
            let mut next: Digits = smallvec![0; e * a];
            for j in 0..e - 1 {
                next[j * a..(j + 1) * a].copy_from_slice(&cur[(j + 1) * a..(j + 2) * a]);
            }
            for c in 0..a {
                let v = cur[c] / self.p as u128;
                next[(e - 1) * a + c] = mt.neg(v);
            }
            cur = next;
        }
        cur
    }

    fn normalize(&self, val: i64, prec: i64, d: Digits) -> Scalar {
        let prec = prec.min(val.saturating_add(self.rel_cap()));
        match self.raw_val(&d) {
            None => self.zero_at(prec),
            Some(t) => {
                if val + t >= prec {
                    return self.zero_at(prec);
                }
                let d = if t == 0 { d } else { self.raw_div_pi(&d, t) };
                Scalar { val: val + t, prec, d, ctx: self.id }
            }
        }
    }

    // ---- constructors ----

    pub fn zero_at(&self, prec: i64) -> Scalar {
        Scalar { val: prec, prec, d: SmallVec::new(), ctx: self.id }
    }

    pub fn zero(&self) -> Scalar {
        self.zero_at(PREC_INF)
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> Scalar {
        if c == 0 {
            return self.zero();
        }
        let mut d: Digits = smallvec![0; self.len()];
        d[0] = self.zq.mt.from_i64(c);
        self.normalize(0, PREC_INF, d)
    }

    pub fn from_bigint(&self, c: &BigInt) -> Scalar {
        self.from_rational(&BigRational::from_integer(c.clone()))
    }

    /// Element of Z_q given by its coefficient slice (known mod p^R).
    pub fn from_zq(&self, z: &[u128]) -> Scalar {
        let mut d: Digits = smallvec![0; self.len()];
        d[..self.a].copy_from_slice(z);
        self.normalize(0, self.rel_cap(), d)
    }

    /// Exact rational, known to full relative precision.
    pub fn from_rational(&self, x: &BigRational) -> Scalar {
        if x.is_zero() {
            return self.zero();
        }
        let p = BigInt::from(self.p);
        let (mut n, mut dn) = (x.numer().clone(), x.denom().clone());
        let mut v = 0i64;
        while n.is_multiple_of(&p) {
            n /= &p;
            v += 1;
        }
        while dn.is_multiple_of(&p) {
            dn /= &p;
            v -= 1;
        }
        let modulus = BigInt::from(self.zq.mt.m);
        let nm = n.mod_floor(&modulus).to_u128().unwrap();
        let dm = dn.mod_floor(&modulus).to_u128().unwrap();
        let mt = &self.zq.mt;
        let mut dz = self.zq.zero();
        dz[0] = mt.to_mont(dm);
        let inv = self.zq.inv(&dz).expect("denominator prime to p");
        let mut nz = self.zq.zero();
        nz[0] = mt.to_mont(nm);
        let mut u = self.zq.mul(&nz, &inv);
        // p^v = (-1)^v pi_m^{ev}
        if v % 2 != 0 {
            u = self.zq.neg(&u);
        }
        let mut d: Digits = smallvec![0; self.len()];
        d[..self.a].copy_from_slice(&u);
        let val = v * self.e;
        self.normalize(val, PREC_INF, d)
    }

    /// pi_m^k
    pub fn pi_m_pow(&self, k: i64) -> Scalar {
        let mut d: Digits = smallvec![0; self.len()];
        d[0] = self.zq.mt.one();
        Scalar { val: k, prec: PREC_INF, d, ctx: self.id }
    }

    /// Dwork's pi = pi_m^m.
    pub fn pi(&self) -> Scalar {
        self.pi_m_pow(self.m)
    }

    pub fn teichmuller(&self, c: u32) -> Scalar {
        if c == 0 {
            return self.zero();
        }
        let z = self.zq.teichmuller(c);
        self.from_zq(&z)
    }

    // ---- queries ----

    pub fn is_zero(&self, x: &Scalar) -> bool {
        x.d.is_empty()
    }

    /// Valuation in pi_m-units (None at precision zero).
    pub fn val_units(&self, x: &Scalar) -> Option<i64> {
        if x.d.is_empty() {
            None
        } else {
            Some(x.val)
        }
    }

    /// ord_p as an exact rational; None for zero at precision.
    pub fn ord(&self, x: &Scalar) -> Option<Q> {
        self.val_units(x).map(|v| Q::new(v, self.e))
    }

    /// Lower bound for ord_p: the valuation, or the precision for zero.
    pub fn ord_lb(&self, x: &Scalar) -> Q {
        Q::new(x.val.min(PREC_INF), self.e)
    }

    pub fn prec_ord(&self, x: &Scalar) -> Q {
        Q::new(x.prec, self.e)
    }

    pub fn prec_units(&self, x: &Scalar) -> i64 {
        x.prec
    }

    pub fn digits<'a>(&self, x: &'a Scalar) -> &'a [u128] {
        &x.d
    }

    /// Leading unit coefficient u_0 reduced to F_q.
    pub fn leading_residue(&self, x: &Scalar) -> Option<u32> {
        if x.d.is_empty() {
            None
        } else {
            Some(self.zq.residue(&x.d[..self.a]))
        }
    }

    pub fn eq_at(&self, x: &Scalar, y: &Scalar) -> bool {
        self.is_zero(&self.sub(x, y))
    }

    /// Units digit structure: value of x as integer mod p^k when x in Z_p (a=1, no pi part).
    pub fn with_prec(&self, x: &Scalar, prec: i64) -> Scalar {
        if prec >= x.prec {
            return x.clone();
        }
        if x.d.is_empty() || x.val >= prec {
            return self.zero_at(prec);
        }
        let mut y = x.clone();
        y.prec = prec;
        y
    }

    // ---- arithmetic ----

    pub fn neg(&self, x: &Scalar) -> Scalar {
        self.check(x);
        let mt = &self.zq.mt;
        let mut y = x.clone();
        for v in y.d.iter_mut() {
            *v = mt.neg(*v);
        }
        y
    }

    pub fn add(&self, x: &Scalar, y: &Scalar) -> Scalar {
        self.check(x);
        self.check(y);
        let prec = x.prec.min(y.prec);
        if x.d.is_empty() {
            return self.with_prec(y, prec);
        }
        if y.d.is_empty() {
            return self.with_prec(x, prec);
        }
        let v = x.val.min(y.val);
        if v >= prec {
            return self.zero_at(prec);
        }
        let mt = &self.zq.mt;
        let mut acc: Digits = if x.val == v { x.d.clone() } else { self.raw_shift(&x.d, x.val - v) };
        let other: Digits = if y.val == v { y.d.clone() } else { self.raw_shift(&y.d, y.val - v) };
        for (a, b) in acc.iter_mut().zip(other.iter()) {
            *a = mt.add(*a, *b);
        }
        self.normalize(v, prec, acc)
    }

    pub fn sub(&self, x: &Scalar, y: &Scalar) -> Scalar {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Scalar, y: &Scalar) -> Scalar {
        self.check(x);
        self.check(y);
        match (x.d.is_empty(), y.d.is_empty()) {
            (true, true) => return self.zero_at(x.prec.saturating_add(y.prec).min(PREC_INF)),
            (true, false) => return self.zero_at(x.prec.saturating_add(y.val).min(PREC_INF)),
            (false, true) => return self.zero_at(y.prec.saturating_add(x.val).min(PREC_INF)),
            _ => {}
        }
        let val = x.val + y.val;
        let rel = (x.prec - x.val).min(y.prec - y.val);
        let d = self.raw_mul(&x.d, &y.d);
        self.normalize(val, val.saturating_add(rel).min(PREC_INF), d)
    }

    pub fn mul_int(&self, x: &Scalar, c: i64) -> Scalar {
        self.mul(x, &self.from_int(c))
    }

    /// x * pi_m^k for any integer k.
    pub fn shift(&self, x: &Scalar, k: i64) -> Scalar {
        self.check(x);
        let mut y = x.clone();
        y.prec = y.prec.saturating_add(k).min(PREC_INF);
        if y.d.is_empty() {
            y.val = y.prec;
        } else {
            y.val += k;
        }
        y
    }

    pub fn inv(&self, x: &Scalar) -> Result<Scalar> {
        self.check(x);
        if x.d.is_empty() {
            return Err(Error::Precision("inverse of a scalar that is zero at precision".into()));
        }
        let a = self.a;
        let u0inv = self.zq.inv(&x.d[..a]).expect("normalized leading digit is a unit");
        let mut y: Digits = smallvec![0; self.len()];
        y[..a].copy_from_slice(&u0inv);
        let mut two: Digits = smallvec![0; self.len()];
        two[0] = self.zq.mt.from_i64(2);
        let mt = &self.zq.mt;
        let mut prec = 1i64;
        while prec < self.rel_cap() + 1 {
            let uy = self.raw_mul(&x.d, &y);
            let mut t = two.clone();
            for (a, b) in t.iter_mut().zip(uy.iter()) {
                *a = mt.sub(*a, *b);
            }
            y = self.raw_mul(&y, &t);
            prec *= 2;
        }
        let rel = x.prec - x.val;
        Ok(self.normalize(-x.val, (-x.val).saturating_add(rel), y))
    }

    pub fn div(&self, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &Scalar, mut e: u64) -> Scalar {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Frobenius on coefficients; fixes pi_m.
    pub fn sigma(&self, x: &Scalar) -> Scalar {
        self.sigma_pow(x, 1)
    }

    pub fn sigma_pow(&self, x: &Scalar, k: i64) -> Scalar {
        self.check(x);
        if self.a == 1 || x.d.is_empty() || k.rem_euclid(self.a as i64) == 0 {
            return x.clone();
        }
        let a = self.a;
        let mut y = x.clone();
        for j in 0..self.e as usize {
            let s = self.zq.sigma_pow(&x.d[j * a..(j + 1) * a], k);
            y.d[j * a..(j + 1) * a].copy_from_slice(&s);
        }
        y
    }

    pub fn sigma_inv(&self, x: &Scalar) -> Scalar {
        self.sigma_pow(x, -1)
    }

    /// Image of a scalar of `src` (ramification m' dividing m) in this field.
    pub fn embed(&self, src: &Ctx, x: &Scalar) -> Scalar {
        src.check(x);
        assert!(Arc::ptr_eq(&self.zq, &src.zq) || (self.p == src.p && self.a == src.a));
        assert_eq!(self.m % src.m, 0, "ramification must divide");
        let k = self.m / src.m;
        let scale = |v: i64| if v >= PREC_INF { PREC_INF } else { v * k };
        if x.d.is_empty() {
            return self.zero_at(scale(x.prec));
        }
        let a = self.a;
        let mut d: Digits = smallvec![0; self.len()];
        for j in 0..src.e as usize {
            let pos = j * k as usize;
            d[pos * a..(pos + 1) * a].copy_from_slice(&x.d[j * a..(j + 1) * a]);
        }
        Scalar { val: x.val * k, prec: scale(x.prec).min(x.val * k + self.rel_cap()), d, ctx: self.id }
    }

    /// The value as an integer modulo p^k, for scalars lying in Z_p with
    /// nonnegative valuation. Used for exact comparisons in tests.
    pub fn to_zp_residue(&self, x: &Scalar, k: u32) -> Option<BigInt> {
        if x.d.is_empty() {
            return Some(BigInt::zero());
        }
        if x.val < 0 || x.val % self.e != 0 {
            return None;
        }
        let a = self.a;
        if self.d_has_pi_part(x) || x.d[1..a].iter().any(|&c| c != 0) {
            return None;
        }
        let u = BigInt::from(self.zq.mt.from_mont(x.d[0]));
        let pk = BigInt::from(self.p).pow(k);
        let k_p = x.val / self.e;
        let sign = if k_p % 2 == 0 { 1 } else { -1 };
        let scaled: BigInt = u * BigInt::from(self.p).pow(k_p as u32) * BigInt::from(sign);
        Some(scaled.mod_floor(&pk))
    }

    fn d_has_pi_part(&self, x: &Scalar) -> bool {
        x.d[self.a..].iter().any(|&c| c != 0)
    }

    /// Human-readable coefficient polynomial of digit j (generator X).
    pub fn coeff_string(&self, x: &Scalar, j: usize) -> String {
        let a = self.a;
        let mut parts = Vec::new();
        for i in 0..a {
            let c = self.zq.mt.from_mont(x.d[j * a + i]);
            if c == 0 {
                continue;
            }
            parts.push(match i {
                0 => format!("{c}"),
                1 => format!("{c}*X"),
                _ => format!("{c}*X^{i}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Terms (pi_m exponent, coefficient string) of a scalar.
    pub fn terms(&self, x: &Scalar) -> Vec<(i64, String)> {
        let a = self.a;
        let mut out = Vec::new();
        if x.d.is_empty() {
            return out;
        }
        for j in 0..self.e as usize {
            if x.d[j * a..(j + 1) * a].iter().any(|&c| c != 0) && x.val + (j as i64) < x.prec {
                out.push((x.val + j as i64, self.coeff_string(x, j)));
            }
        }
        out
    }

    /// Rebuild a scalar from (pi_m exponent, coefficient digits) terms.
    pub fn from_terms(&self, terms: &[(i64, Vec<BigInt>)], prec: i64) -> Result<Scalar> {
        let mut acc = self.zero_at(prec);
        let modulus = BigInt::from(self.zq.mt.m);
        for (j, coeffs) in terms {
            if coeffs.len() > self.a {
                return Err(Error::Domain("coefficient degree exceeds a".into()));
            }
            let mut z = self.zq.zero();
            for (i, c) in coeffs.iter().enumerate() {
                z[i] = self.zq.mt.to_mont(c.mod_floor(&modulus).to_u128().unwrap());
            }
            let mut d: Digits = smallvec![0; self.len()];
            d[..self.a].copy_from_slice(&z);
            let term = self.normalize(0, PREC_INF, d);
            acc = self.add(&acc, &self.shift(&term, *j));
        }
        Ok(self.with_prec(&acc, prec))
    }
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        self.d.is_empty()
    }
}

/// ord_p(k!) by Legendre's formula.
pub fn ord_factorial(k: u64, p: u64) -> u64 {
    let mut s = 0;
    let mut q = k / p;
    while q > 0 {
        s += q;
        q /= p;
    }
    s
}

/// Floor of a rational as i64.
pub fn q_floor(x: Q) -> i64 {
    x.floor().to_integer()
}

pub fn q_ceil(x: Q) -> i64 {
    x.ceil().to_integer()
}

pub fn q_abs(x: Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_squared_is_minus_three() {
        let k = Ctx::new(3, 1, 1, 20).unwrap();
        let pi = k.pi();
        let sq = k.mul(&pi, &pi);
        assert!(k.eq_at(&sq, &k.from_int(-3)));
        assert_eq!(k.ord(&sq), Some(Q::from_integer(1)));
    }

    #[test]
    fn uniformizer_relation_in_k2() {
        let k = Ctx::new(3, 1, 2, 20).unwrap();
        let t = k.pow(&k.pi_m_pow(1), 4);
        assert!(k.eq_at(&t, &k.from_int(-3)));
        assert_eq!(k.ord(&k.pi_m_pow(1)), Some(Q::new(1, 4)));
    }

    #[test]
    fn additive_inverse_is_zero() {
        let k = Ctx::new(5, 1, 1, 20).unwrap();
        let x = k.add(&k.from_int(7), &k.pi());
        let z = k.add(&x, &k.neg(&x));
        assert!(k.is_zero(&z));
        assert_eq!(k.ord(&z), None);
    }

    #[test]
    fn inverse_roundtrip() {
        let k = Ctx::new(7, 1, 3, 20).unwrap();
        let x = k.add(&k.pi_m_pow(-2), &k.from_int(5));
        let y = k.inv(&x).unwrap();
        assert!(k.eq_at(&k.mul(&x, &y), &k.one()));
    }

    #[test]
    fn rational_valuation() {
        let k = Ctx::new(3, 1, 1, 20).unwrap();
        let x = k.from_rational(&BigRational::new(BigInt::from(18), BigInt::from(5)));
        assert_eq!(k.ord(&x), Some(Q::from_integer(2)));
        let back = k.mul(&x, &k.from_int(5));
        assert!(k.eq_at(&back, &k.from_int(18)));
    }

    #[test]
    fn embedding_preserves_products() {
        let k1 = Ctx::new(5, 1, 1, 20).unwrap();
        let k3 = Ctx::with_ring(k1.zq.clone(), 3, 20);
        let x = k1.add(&k1.pi(), &k1.from_int(2));
        let y = k1.sub(&k1.from_int(11), &k1.pow(&k1.pi(), 3));
        let lhs = k3.embed(&k1, &k1.mul(&x, &y));
        let rhs = k3.mul(&k3.embed(&k1, &x), &k3.embed(&k1, &y));
        assert!(k3.eq_at(&lhs, &rhs));
        assert!(k3.eq_at(&k3.embed(&k1, &k1.pi()), &k3.pi()));
    }
}
