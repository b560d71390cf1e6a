//! Dense matrices over K_m with precision-tracked scalars.
//!
//! Row convention throughout: a semilinear map with matrix A sends e_i to
//! sum_j A(i,j) e_j.

use crate::error::{Error, Result};
use crate::padic::{Ctx, Scalar, Q};

pub type Mat = Vec<Vec<Scalar>>;

pub fn zeros(k: &Ctx, r: usize, c: usize) -> Mat {
    vec![vec![k.zero(); c]; r]
}

pub fn identity(k: &Ctx, d: usize) -> Mat {
    let mut m = zeros(k, d, d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = k.one();
    }
    m
}

pub fn mul(k: &Ctx, a: &Mat, b: &Mat) -> Mat {
    let r = a.len();
    let c = b.first().map_or(0, |row| row.len());
    let mut out = zeros(k, r, c);
    for i in 0..r {
        for (t, bt) in b.iter().enumerate() {
            let x = &a[i][t];
            if k.is_zero(x) && k.prec_units(x) >= crate::padic::scalar::PREC_INF {
                continue;
            }
            for j in 0..c {
                out[i][j] = k.add(&out[i][j], &k.mul(x, &bt[j]));
            }
        }
    }
    out
}

pub fn sub(k: &Ctx, a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| k.sub(x, y)).collect()).collect()
}

pub fn map(a: &Mat, f: impl Fn(&Scalar) -> Scalar) -> Mat {
    a.iter().map(|row| row.iter().map(&f).collect()).collect()
}

pub fn sigma_pow(k: &Ctx, a: &Mat, s: i64) -> Mat {
    map(a, |x| k.sigma_pow(x, s))
}

pub fn transpose(a: &Mat) -> Mat {
    let c = a.first().map_or(0, |r| r.len());
    (0..c).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Minimum valuation over all entries (None if every entry is zero at precision).
pub fn min_ord(k: &Ctx, a: &Mat) -> Option<Q> {
    a.iter().flatten().filter_map(|x| k.ord(x)).min()
}

/// Minimum absolute precision over the entries, in ord units.
pub fn min_prec(k: &Ctx, a: &Mat) -> Q {
    a.iter().flatten().map(|x| k.prec_ord(x)).min().unwrap_or(Q::from_integer(i64::MAX / 16))
}

fn pivot_row(k: &Ctx, a: &Mat, col: usize, from: usize) -> Option<usize> {
    (from..a.len()).filter(|&r| !k.is_zero(&a[r][col])).min_by_key(|&r| k.val_units(&a[r][col]).unwrap())
}

/// Determinant by elimination with minimal-valuation pivots.
pub fn det(k: &Ctx, a: &Mat) -> Scalar {
    let n = a.len();
    let mut m = a.clone();
    let mut acc = k.one();
    for c in 0..n {
        let Some(r) = pivot_row(k, &m, c, c) else {
            // a zero column at precision: the determinant is zero to the
            // precision of that column times the remaining pivots
            let prec = m[c..].iter().map(|row| k.prec_units(&row[c])).min().unwrap_or(0);
            let z = k.zero_at(prec);
            return k.mul(&acc, &z);
        };
        if r != c {
            m.swap(r, c);
            acc = k.neg(&acc);
        }
        let piv = m[c][c].clone();
        acc = k.mul(&acc, &piv);
        let inv = k.inv(&piv).expect("nonzero pivot");
        for r in c + 1..n {
            if k.is_zero(&m[r][c]) {
                continue;
            }
            let f = k.mul(&m[r][c], &inv);
            for j in c + 1..n {
                let t = k.mul(&f, &m[c][j]);
                m[r][j] = k.sub(&m[r][j], &t);
            }
        }
    }
    acc
}

/// Inverse by Gauss-Jordan with minimal-valuation pivots.
pub fn inverse(k: &Ctx, a: &Mat) -> Result<Mat> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(k, n);
    for c in 0..n {
        let r = pivot_row(k, &m, c, c)
            .ok_or_else(|| Error::Precision(format!("matrix singular at precision (column {c})")))?;
        m.swap(r, c);
        inv.swap(r, c);
        let pinv = k.inv(&m[c][c])?;
        for j in 0..n {
            m[c][j] = k.mul(&m[c][j], &pinv);
            inv[c][j] = k.mul(&inv[c][j], &pinv);
        }
        for r in 0..n {
            if r == c || k.is_zero(&m[r][c]) {
                continue;
            }
            let f = m[r][c].clone();
            for j in 0..n {
                let t = k.mul(&f, &m[c][j]);
                m[r][j] = k.sub(&m[r][j], &t);
                let t = k.mul(&f, &inv[c][j]);
                inv[r][j] = k.sub(&inv[r][j], &t);
            }
        }
    }
    Ok(inv)
}

/// Coefficients [1, c_1, ..., c_n] of det(1 - T A) (Berkowitz, division free).
pub fn charpoly_reversed(k: &Ctx, a: &Mat) -> Vec<Scalar> {
    let n = a.len();
    if n == 0 {
        return vec![k.one()];
    }
    let mut vect = vec![k.one(), k.neg(&a[0][0])];
    for r in 1..n {
        // column C = A[0..r][r], row R = A[r][0..r]
        let mut q = Vec::with_capacity(r + 2);
        q.push(k.one());
        q.push(k.neg(&a[r][r]));
        let mut cur: Vec<Scalar> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let mut dot = k.zero();
            for i in 0..r {
                dot = k.add(&dot, &k.mul(&a[r][i], &cur[i]));
            }
            q.push(k.neg(&dot));
            let next: Vec<Scalar> = (0..r)
                .map(|i| (0..r).fold(k.zero(), |acc, j| k.add(&acc, &k.mul(&a[i][j], &cur[j]))))
                .collect();
            cur = next;
        }
        let mut nv = vec![k.zero(); r + 2];
        for i in 0..r + 2 {
            for j in 0..=i.min(r) {
                let t = i - j;
                if t < q.len() {
                    nv[i] = k.add(&nv[i], &k.mul(&q[t], &vect[j]));
                }
            }
        }
        vect = nv;
    }
    vect
}

pub fn kronecker(k: &Ctx, a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = (a.len(), a.first().map_or(0, |r| r.len()));
    let (rb, cb) = (b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = zeros(k, ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            for s in 0..rb {
                for t in 0..cb {
                    out[i * rb + s][j * cb + t] = k.mul(&a[i][j], &b[s][t]);
                }
            }
        }
    }
    out
}

pub fn embed(dst: &Ctx, src: &Ctx, a: &Mat) -> Mat {
    map(a, |x| dst.embed(src, x))
}

/// True when every entry of a - b is zero at precision `prec_units`.
pub fn eq_to(k: &Ctx, a: &Mat, b: &Mat, prec_units: i64) -> bool {
    a.iter().zip(b).all(|(ra, rb)| {
        ra.iter().zip(rb).all(|(x, y)| {
            let d = k.sub(x, y);
            k.is_zero(&d) || k.val_units(&d).unwrap() >= prec_units
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_mat(k: &Ctx, rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&x| k.from_int(x)).collect()).collect()
    }

    #[test]
    fn inverse_and_det() {
        let k = Ctx::new(5, 1, 1, 20).unwrap();
        let a = int_mat(&k, &[&[2, 5, 1], &[0, 25, 3], &[1, 1, 1]]);
        let inv = inverse(&k, &a).unwrap();
        assert!(eq_to(&k, &mul(&k, &a, &inv), &identity(&k, 3), 60));
        // det = 2(25-3) - 5(0-3) + 1(0-25) = 34
        assert!(k.eq_at(&det(&k, &a), &k.from_int(34)));
    }

    #[test]
    fn berkowitz_matches_two_by_two() {
        let k = Ctx::new(3, 1, 1, 20).unwrap();
        let a = int_mat(&k, &[&[1, 2], &[3, 4]]);
        let c = charpoly_reversed(&k, &a);
        // det(1 - T A) = 1 - 5T - 2T^2
        assert!(k.eq_at(&c[1], &k.from_int(-5)));
        assert!(k.eq_at(&c[2], &k.from_int(-2)));
        let b = int_mat(&k, &[&[2, 0, 1], &[1, 3, 0], &[0, 1, 1]]);
        let c = charpoly_reversed(&k, &b);
        // trace 6, det 2*3*1 + 1*1*1 = 7
        assert!(k.eq_at(&c[1], &k.from_int(-6)));
        assert!(k.eq_at(&c[3], &k.from_int(-7)));
        assert!(k.eq_at(&c[3], &k.neg(&det(&k, &b))));
    }
}
