//! Laurent polynomials over F_q.

use crate::error::{Error, Result};
use crate::ff::Field;
use crate::geometry::{Exp, SupportSet, MAX_N};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct LaurentPoly {
    pub n: usize,
    pub fq: Arc<Field>,
    /// exponent -> nonzero packed F_q coefficient
    pub terms: BTreeMap<Exp, u32>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.fq.p == other.fq.p && self.fq.k == other.fq.k && self.terms == other.terms
    }
}

impl LaurentPoly {
    pub fn new(n: usize, fq: Arc<Field>) -> Result<LaurentPoly> {
        if n == 0 || n > MAX_N {
            return Err(Error::Unsupported(format!("dimension {n} not in 1..={MAX_N}")));
        }
        Ok(LaurentPoly { n, fq, terms: BTreeMap::new() })
    }

    pub fn p(&self) -> u32 {
        self.fq.p
    }

    pub fn a(&self) -> u32 {
        self.fq.k
    }

    /// Add c * x^u, dropping the term if the coefficient cancels.
    pub fn add_term(&mut self, u: Exp, c: u32) {
        let cur = self.terms.get(&u).copied().unwrap_or(0);
        let s = self.fq.add(cur, c);
        if s == 0 {
            self.terms.remove(&u);
        } else {
            self.terms.insert(u, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Result<SupportSet> {
        SupportSet::new(self.n, self.terms.keys().copied().collect())
    }

    /// Terms of x_l d/dx_l f.
    pub fn log_derivative(&self, l: usize) -> Vec<(Exp, u32)> {
        self.terms
            .iter()
            .filter_map(|(u, &c)| {
                let d = self.fq.scale(c, u[l] as i64);
                (d != 0).then_some((*u, d))
            })
            .collect()
    }

    /// Evaluate at x with x_j = g^{l_j} in F_q (g the field generator).
    pub fn eval_log(&self, logs: &[u64]) -> u32 {
        let ord = self.fq.q() - 1;
        let mut acc = 0u32;
        for (u, &c) in self.terms.iter() {
            let mut e: i128 = 0;
            for j in 0..self.n {
                e += u[j] as i128 * logs[j] as i128;
            }
            let e = e.rem_euclid(ord as i128) as u64;
            acc = self.fq.add(acc, self.fq.mul(c, self.fq.exp(e)));
        }
        acc
    }

    /// Human readable form in the text grammar.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (u, &c) in self.terms.iter() {
            let mut s = coeff_to_string(&self.fq, c);
            if self.fq.k > 1 {
                s = format!("({s})");
            }
            for j in 0..self.n {
                if u[j] != 0 {
                    s.push_str(&format!("*x{}^{}", j + 1, u[j]));
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

/// F_q element as "c0 + c1*X + ..." (plain integer when it lies in F_p).
pub fn coeff_to_string(fq: &Field, c: u32) -> String {
    let d = fq.digits(c);
    let mut parts = Vec::new();
    for (i, &x) in d.iter().enumerate() {
        if x == 0 {
            continue;
        }
        parts.push(match i {
            0 => format!("{x}"),
            1 => format!("{x}*X"),
            _ => format!("{x}*X^{i}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Inverse of `coeff_to_string`; integers are reduced mod p.
pub fn coeff_from_string(fq: &Field, s: &str) -> Result<u32> {
    let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("coefficient {s:?}: {msg}") };
    let mut digits = vec![0i64; fq.k as usize];
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad("empty"));
    }
    let mut rest = t.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            sign = -1;
        } else if !first {
            return Err(bad("expected + or -"));
        }
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        let (num, power) = match term.find('X') {
            None => (term, 0usize),
            Some(ix) => {
                let num = term[..ix].trim_end_matches('*');
                let tail = &term[ix + 1..];
                let power = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^').ok_or_else(|| bad("expected ^"))?.parse().map_err(|_| bad("bad power"))?
                };
                (num, power)
            }
        };
        let c: i64 = if num.is_empty() {
            1
        } else {
            let big: num_bigint::BigInt = num.parse().map_err(|_| bad("bad integer"))?;
            let r = big % num_bigint::BigInt::from(fq.p);
            i64::try_from(r).unwrap()
        };
        if power >= fq.k as usize {
            return Err(bad("power of X exceeds the field degree"));
        }
        digits[power] = (digits[power] + sign * c).rem_euclid(fq.p as i64);
    }
    let d: Vec<u32> = digits.iter().map(|&x| x as u32).collect();
    Ok(fq.from_digits(&d))
}
