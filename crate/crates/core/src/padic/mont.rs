//! Montgomery arithmetic modulo an odd modulus below 2^126.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

#[inline]
fn mul_64(a: u64, b: u64) -> u128 {
    (a as u128) * (b as u128)
}

/// Full 128x128 -> 256 bit product, returned as (lo, hi).
#[inline]
pub fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a as u64, (a >> 64) as u64);
    let (b0, b1) = (b as u64, (b >> 64) as u64);
    let p00 = mul_64(a0, b0);
    let p01 = mul_64(a0, b1);
    let p10 = mul_64(a1, b0);
    let p11 = mul_64(a1, b1);
    let (mid, c1) = p01.overflowing_add(p10);
    let (lo, c2) = p00.overflowing_add(mid << 64);
    let hi = p11 + (mid >> 64) + ((c1 as u128) << 64) + c2 as u128;
    (lo, hi)
}

#[derive(Clone, Debug)]
pub struct Mont {
    pub m: u128,
    /// -m^{-1} mod 2^128
    minv: u128,
    /// 2^256 mod m
    r2: u128,
    one: u128,
}

impl Mont {
    pub fn new(m: u128) -> Self {
        assert!(m % 2 == 1 && m < (1u128 << 126), "modulus must be odd and below 2^126");
        let mut inv: u128 = 1;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(m.wrapping_mul(inv)));
        }
        debug_assert_eq!(m.wrapping_mul(inv), 1);
        let big = BigUint::from(1u8) << 256usize;
        let r2 = (big % BigUint::from(m)).to_u128().unwrap();
        let r1 = ((BigUint::from(1u8) << 128usize) % BigUint::from(m)).to_u128().unwrap();
        Mont { m, minv: inv.wrapping_neg(), r2, one: r1 }
    }

    #[inline]
    fn redc(&self, lo: u128, hi: u128) -> u128 {
        let q = lo.wrapping_mul(self.minv);
        let (ql, qh) = mul_wide(q, self.m);
        let (_, carry) = lo.overflowing_add(ql);
        // hi + qh + carry < 2m < 2^127
        let t = hi + qh + carry as u128;
        if t >= self.m {
            t - self.m
        } else {
            t
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let (lo, hi) = mul_wide(a, b);
        self.redc(lo, hi)
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn one(&self) -> u128 {
        self.one
    }

    pub fn to_mont(&self, x: u128) -> u128 {
        self.mul(x % self.m, self.r2)
    }

    pub fn from_mont(&self, x: u128) -> u128 {
        self.redc(x, 0)
    }

    pub fn from_i64(&self, x: i64) -> u128 {
        let v = self.to_mont(x.unsigned_abs() as u128);
        if x < 0 {
            self.neg(v)
        } else {
            v
        }
    }

    pub fn pow(&self, a: u128, mut e: u128) -> u128 {
        let mut base = a;
        let mut acc = self.one;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}
