//! The unramified ring Z_q / p^R = (Z/p^R)[X]/(P) with Frobenius.
//!
//! Elements are slices of `a` Montgomery residues, lowest power of X first.

use super::mont::Mont;
use crate::error::{Error, Result};
use crate::ff::Field;

/// Largest R with p^R < 2^126.
pub fn max_digits(p: u64) -> u32 {
    let mut r = 0u32;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(p as u128) {
        if next >= (1u128 << 126) {
            break;
        }
        acc = next;
        r += 1;
    }
    r
}

#[derive(Clone, Debug)]
pub struct ZqRing {
    pub p: u64,
    pub a: usize,
    /// number of p-adic digits kept per coefficient
    pub r: u32,
    pub mt: Mont,
    /// residue field with the same modulus
    pub fq: Field,
    /// lifted modulus coefficients P_0..P_{a-1} (monic), Montgomery form
    modulus: Vec<u128>,
    /// sigma(X), the root of P congruent to X^p
    sigma_x: Vec<u128>,
    /// Montgomery form of p
    p_m: u128,
}

impl ZqRing {
    pub fn new(p: u64, a: usize) -> Result<ZqRing> {
        if p == 2 {
            return Err(Error::Usage("p = 2 is not supported".into()));
        }
        if !crate::ff::is_prime(p) {
            return Err(Error::Usage(format!("{p} is not prime")));
        }
        if a == 0 {
            return Err(Error::Usage("a must be positive".into()));
        }
        let fq = Field::new(p as u32, a as u32)?;
        let r = max_digits(p);
        let mt = Mont::new((p as u128).pow(r));
        let modulus: Vec<u128> = fq.modulus[..a].iter().map(|&c| mt.to_mont(c as u128)).collect();
        let p_m = mt.to_mont(p as u128);
        let mut ring = ZqRing { p, a, r, mt, fq, modulus, sigma_x: Vec::new(), p_m };
        ring.sigma_x = ring.lift_frobenius_root();
        Ok(ring)
    }

    pub fn zero(&self) -> Vec<u128> {
        vec![0; self.a]
    }

    pub fn one(&self) -> Vec<u128> {
        let mut v = self.zero();
        v[0] = self.mt.one();
        v
    }

    pub fn from_int(&self, c: i64) -> Vec<u128> {
        let mut v = self.zero();
        v[0] = self.mt.from_i64(c);
        v
    }

    /// Multiplicative representative-free lift of packed F_q digits.
    pub fn lift_digits(&self, x: u32) -> Vec<u128> {
        (0..self.a).map(|i| self.mt.to_mont(self.fq.digit(x, i) as u128)).collect()
    }

    /// Reduction mod p to a packed F_q element.
    pub fn residue(&self, x: &[u128]) -> u32 {
        let d: Vec<u32> = x.iter().map(|&c| (self.mt.from_mont(c) % self.p as u128) as u32).collect();
        self.fq.from_digits(&d)
    }

    pub fn is_zero(&self, x: &[u128]) -> bool {
        x.iter().all(|&c| c == 0)
    }

    /// p-adic valuation, capped at r.
    pub fn vp(&self, x: &[u128]) -> u32 {
        x.iter().map(|&c| vp_u128(c, self.p, self.r)).min().unwrap_or(self.r)
    }

    pub fn is_unit(&self, x: &[u128]) -> bool {
        x.iter().any(|&c| c % self.p as u128 != 0)
    }

    pub fn add_into(&self, acc: &mut [u128], y: &[u128]) {
        for (a, &b) in acc.iter_mut().zip(y) {
            *a = self.mt.add(*a, b);
        }
    }

    pub fn sub_into(&self, acc: &mut [u128], y: &[u128]) {
        for (a, &b) in acc.iter_mut().zip(y) {
            *a = self.mt.sub(*a, b);
        }
    }

    pub fn neg(&self, x: &[u128]) -> Vec<u128> {
        x.iter().map(|&c| self.mt.neg(c)).collect()
    }

    pub fn add(&self, x: &[u128], y: &[u128]) -> Vec<u128> {
        let mut v = x.to_vec();
        self.add_into(&mut v, y);
        v
    }

    pub fn sub(&self, x: &[u128], y: &[u128]) -> Vec<u128> {
        let mut v = x.to_vec();
        self.sub_into(&mut v, y);
        v
    }

    /// acc += x * y
    pub fn mul_acc(&self, acc: &mut [u128], x: &[u128], y: &[u128]) {
        if self.a == 1 {
            acc[0] = self.mt.add(acc[0], self.mt.mul(x[0], y[0]));
            return;
        }
        let prod = self.mul(x, y);
        self.add_into(acc, &prod);
    }

    pub fn mul(&self, x: &[u128], y: &[u128]) -> Vec<u128> {
        let a = self.a;
        if a == 1 {
            return vec![self.mt.mul(x[0], y[0])];
        }
        let mut full = vec![0u128; 2 * a - 1];
        for i in 0..a {
            if x[i] == 0 {
                continue;
            }
            for j in 0..a {
                full[i + j] = self.mt.add(full[i + j], self.mt.mul(x[i], y[j]));
            }
        }
        // X^a = -sum P_i X^i
        for k in (a..2 * a - 1).rev() {
            let top = full[k];
            if top == 0 {
                continue;
            }
            for i in 0..a {
                let t = self.mt.mul(top, self.modulus[i]);
                full[k - a + i] = self.mt.sub(full[k - a + i], t);
            }
        }
        full.truncate(a);
        full
    }

    pub fn scale_int(&self, x: &[u128], c: i64) -> Vec<u128> {
        let cm = self.mt.from_i64(c);
        x.iter().map(|&v| self.mt.mul(v, cm)).collect()
    }

    pub fn mul_p(&self, x: &[u128]) -> Vec<u128> {
        x.iter().map(|&v| self.mt.mul(v, self.p_m)).collect()
    }

    /// Divide every coefficient by p^k, assuming divisibility. The top k
    /// digits of the result are undetermined.
    pub fn div_p_pow(&self, x: &[u128], k: u32) -> Vec<u128> {
        let d = (self.p as u128).pow(k);
        x.iter()
            .map(|&v| {
                debug_assert!(v % d == 0);
                v / d
            })
            .collect()
    }

    pub fn pow(&self, x: &[u128], mut e: u128) -> Vec<u128> {
        let mut base = x.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit.
    pub fn inv(&self, x: &[u128]) -> Option<Vec<u128>> {
        let res = self.residue(x);
        if res == 0 {
            return None;
        }
        let mut y = self.lift_digits(self.fq.inv(res));
        let two = self.from_int(2);
        let mut prec = 1u32;
        while prec < self.r {
            let t = self.sub(&two, &self.mul(x, &y));
            y = self.mul(&y, &t);
            prec *= 2;
        }
        Some(y)
    }

    fn eval_modulus(&self, y: &[u128]) -> Vec<u128> {
        // P(y) = y^a + sum P_i y^i
        let mut acc = self.one();
        for i in (0..self.a).rev() {
            acc = self.mul(&acc, y);
            let mut c = self.zero();
            c[0] = self.modulus[i];
            self.add_into(&mut acc, &c);
        }
        acc
    }

    fn eval_modulus_deriv(&self, y: &[u128]) -> Vec<u128> {
        // P'(y) = a y^{a-1} + sum i P_i y^{i-1}
        let mut acc = self.from_int(self.a as i64);
        for i in (1..self.a).rev() {
            acc = self.mul(&acc, y);
            let c = self.scale_int(&{
                let mut c = self.zero();
                c[0] = self.modulus[i];
                c
            }, i as i64);
            self.add_into(&mut acc, &c);
        }
        acc
    }

    fn lift_frobenius_root(&self) -> Vec<u128> {
        if self.a == 1 {
            return self.one();
        }
        let mut x = self.zero();
        x[1] = self.mt.one();
        // start from X^p, then Newton on P
        let mut y = self.pow(&x, self.p as u128);
        let mut prec = 1u32;
        while prec < self.r {
            let f = self.eval_modulus(&y);
            let df = self.eval_modulus_deriv(&y);
            let inv = self.inv(&df).expect("modulus is separable");
            y = self.sub(&y, &self.mul(&f, &inv));
            prec *= 2;
        }
        // one extra pass to absorb the undetermined digit
        let f = self.eval_modulus(&y);
        let df = self.eval_modulus_deriv(&y);
        let inv = self.inv(&df).expect("modulus is separable");
        self.sub(&y, &self.mul(&f, &inv))
    }

    /// The Witt vector Frobenius.
    pub fn sigma(&self, x: &[u128]) -> Vec<u128> {
        if self.a == 1 {
            return x.to_vec();
        }
        let mut acc = self.zero();
        for i in (0..self.a).rev() {
            acc = self.mul(&acc, &self.sigma_x);
            acc[0] = self.mt.add(acc[0], x[i]);
        }
        acc
    }

    /// sigma^k for any integer k (sigma^a = 1).
    pub fn sigma_pow(&self, x: &[u128], k: i64) -> Vec<u128> {
        let k = k.rem_euclid(self.a as i64);
        let mut y = x.to_vec();
        for _ in 0..k {
            y = self.sigma(&y);
        }
        y
    }

    /// Teichmuller lift of a packed F_q element.
    pub fn teichmuller(&self, c: u32) -> Vec<u128> {
        if c == 0 {
            return self.zero();
        }
        let q = self.fq.q() as u128;
        let mut x = self.lift_digits(c);
        for _ in 0..self.r {
            x = self.pow(&x, q);
        }
        x
    }
}

pub fn vp_u128(mut c: u128, p: u64, cap: u32) -> u32 {
    if c == 0 {
        return cap;
    }
    let p = p as u128;
    let mut k = 0;
    while c % p == 0 && k < cap {
        c /= p;
        k += 1;
    }
    k
}
