//! Small finite fields F_{p^k} with log/antilog tables.
//!
//! Elements are packed base-p integers: the digit at position i is the
//! coefficient of X^i in the polynomial basis modulo the field modulus.

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const TABLE_LIMIT: u64 = 1 << 22;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, lowest degree first.
fn trim(v: &mut Vec<u32>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut r: Vec<u32> = prod.into_iter().map(|x| x as u32).collect();
    poly_rem(&mut r, m, p);
    r
}

/// In-place remainder modulo a monic polynomial.
fn poly_rem(r: &mut Vec<u32>, m: &[u32], p: u32) {
    let k = m.len() - 1;
    trim(r);
    while r.len() > k && !(r.len() == 1 && r[0] == 0) {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - k;
        if top != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (top as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
        trim(r);
    }
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while b.iter().any(|&c| c != 0) {
        let inv = inv_mod(*b.last().unwrap(), p);
        let bm: Vec<u32> = b.iter().map(|&c| (c as u64 * inv as u64 % p as u64) as u32).collect();
        poly_rem(&mut a, &bm, p);
        b = std::mem::replace(&mut a, bm);
    }
    a
}

pub fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a as u64, (p - 2) as u64, p as u64) as u32
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Ben-Or irreducibility test for a monic polynomial over F_p.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 0..k / 2 {
        // xp <- xp^p mod m
        let mut acc = vec![1u32];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = poly_gcd(m, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct Field {
    pub p: u32,
    pub k: u32,
    pub size: u32,
    /// Monic modulus, lowest degree first (length k+1).
    pub modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    tr_basis: Vec<u32>,
    pw: Vec<u32>,
}

impl Field {
    /// F_{p^k} with the first primitive modulus in lexicographic enumeration
    /// of coefficient vectors (constant term first).
    pub fn new(p: u32, k: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::Usage(format!("{p} is not prime")));
        }
        let size = (p as u64).checked_pow(k).filter(|&s| s <= TABLE_LIMIT).ok_or_else(|| {
            Error::Unsupported(format!("field of order {p}^{k} exceeds the table limit"))
        })? as u32;
        let mut pw = vec![1u32; k as usize + 1];
        for i in 1..=k as usize {
            pw[i] = pw[i - 1] * p;
        }
        let order = (size - 1) as u64;
        let factors = prime_factors(order);
        if k == 1 {
            // modulus X - g for the least primitive root g
            let g = (1..p.max(2))
                .find(|&g| {
                    p == 2 || factors.iter().all(|&r| pow_mod(g as u64, order / r, p as u64) != 1)
                })
                .unwrap_or(1);
            let modulus = vec![(p - g) % p, 1];
            return Ok(Self::with_tables(p, k, size, modulus, g, pw));
        }
        let count = size; // candidates for the lower k coefficients
        for idx in 0..count {
            let mut m: Vec<u32> = (0..k).map(|i| idx / pw[i as usize] % p).collect();
            m.push(1);
            if m[0] == 0 || !is_irreducible(&m, p) {
                continue;
            }
            // X primitive?
            let x = vec![0u32, 1];
            let prim = factors.iter().all(|&r| {
                let mut acc = vec![1u32];
                let mut base = x.clone();
                let mut e = order / r;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = poly_mulmod(&acc, &base, &m, p);
                    }
                    base = poly_mulmod(&base, &base, &m, p);
                    e >>= 1;
                }
                !(acc.len() == 1 && acc[0] == 1)
            });
            if prim {
                return Ok(Self::with_tables(p, k, size, m, p, pw));
            }
        }
        Err(Error::Domain(format!("no primitive modulus of degree {k} over F_{p}")))
    }

    fn with_tables(p: u32, k: u32, size: u32, modulus: Vec<u32>, gen: u32, pw: Vec<u32>) -> Field {
        let mut f = Field { p, k, size, modulus, exp: Vec::new(), log: Vec::new(), tr_basis: Vec::new(), pw };
        let n = (size - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![0u32; size as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp.push(x);
            log[x as usize] = i as u32;
            x = if k == 1 { ((x as u64 * gen as u64) % p as u64) as u32 } else { f.mul_x(x) };
        }
        f.exp = exp;
        f.log = log;
        // Tr(X^i) = sum_j (X^i)^{p^j}
        let mut tr_basis = Vec::with_capacity(k as usize);
        for i in 0..k {
            let xi = f.pw[i as usize];
            let mut acc = 0u32;
            let mut y = xi;
            for _ in 0..k {
                acc = f.add(acc, y);
                y = f.pow(y, p as u64);
            }
            debug_assert!(acc < p);
            tr_basis.push(acc);
        }
        f.tr_basis = tr_basis;
        f
    }

    fn mul_x(&self, x: u32) -> u32 {
        let p = self.p;
        let k = self.k as usize;
        let top = x / self.pw[k - 1];
        let shifted = (x % self.pw[k - 1]) * p;
        if top == 0 {
            return shifted;
        }
        // subtract top * (modulus - X^k)
        let mut out = 0u32;
        for i in 0..k {
            let d = shifted / self.pw[i] % p;
            let sub = (top as u64 * self.modulus[i] as u64 % p as u64) as u32;
            out += ((d + p - sub) % p) * self.pw[i];
        }
        out
    }

    pub fn q(&self) -> u64 {
        self.size as u64
    }

    pub fn digit(&self, x: u32, i: usize) -> u32 {
        x / self.pw[i] % self.p
    }

    pub fn digits(&self, x: u32) -> Vec<u32> {
        (0..self.k as usize).map(|i| self.digit(x, i)).collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().enumerate().map(|(i, &c)| (c % self.p) * self.pw[i]).sum()
    }

    pub fn from_int(&self, c: i64) -> u32 {
        c.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let mut out = 0;
        for i in 0..self.k as usize {
            out += (self.digit(a, i) + self.digit(b, i)) % self.p * self.pw[i];
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return (self.p - a) % self.p;
        }
        let mut out = 0;
        for i in 0..self.k as usize {
            out += (self.p - self.digit(a, i)) % self.p * self.pw[i];
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        let l = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n as u64;
        self.exp[l as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let n = self.size - 1;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = (self.size - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Multiply by a small integer.
    pub fn scale(&self, a: u32, c: i64) -> u32 {
        self.mul(a, self.from_int(c))
    }

    pub fn log(&self, a: u32) -> u32 {
        self.log[a as usize]
    }

    pub fn exp(&self, i: u64) -> u32 {
        self.exp[(i % (self.size as u64 - 1)) as usize]
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, a: u32) -> u32 {
        if self.k == 1 {
            return a;
        }
        let mut acc = 0u64;
        for i in 0..self.k as usize {
            acc += self.digit(a, i) as u64 * self.tr_basis[i] as u64;
        }
        (acc % self.p as u64) as u32
    }

    /// Image of a root of `sub`'s modulus in this field, if `sub.k` divides `k`.
    pub fn embedding_of(&self, sub: &Field) -> Result<u32> {
        if sub.p != self.p || self.k % sub.k != 0 {
            return Err(Error::Domain("not a subfield".into()));
        }
        if sub.k == 1 {
            return Ok(0);
        }
        let step = (self.size as u64 - 1) / (sub.size as u64 - 1);
        for i in 0..(sub.size as u64 - 1) {
            let y = self.exp(i * step);
            // evaluate the monic modulus at y
            let mut acc = 0u32;
            for &c in sub.modulus.iter().rev() {
                acc = self.add(self.mul(acc, y), c);
            }
            if acc == 0 {
                return Ok(y);
            }
        }
        Err(Error::Domain("subfield modulus has no root".into()))
    }

    /// Map an element of `sub` into this field given the image `root` of X.
    pub fn embed(&self, sub: &Field, root: u32, x: u32) -> u32 {
        if sub.k == 1 {
            return x;
        }
        let mut acc = 0u32;
        for i in (0..sub.k as usize).rev() {
            acc = self.add(self.mul(acc, root), sub.digit(x, i));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_axioms() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.size, 9);
        for a in 1..9 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.pow(a, 8), 1);
        }
        // Frobenius is additive
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(f.pow(f.add(a, b), 3), f.add(f.pow(a, 3), f.pow(b, 3)));
            }
        }
        // trace of 1 is k mod p
        assert_eq!(f.trace(1), 2);
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let small = Field::new(3, 2).unwrap();
        let big = Field::new(3, 4).unwrap();
        let r = big.embedding_of(&small).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                let lhs = big.embed(&small, r, small.mul(a, b));
                let rhs = big.mul(big.embed(&small, r, a), big.embed(&small, r, b));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
