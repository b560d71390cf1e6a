//! Text grammar for Laurent polynomials:
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := integer | '(' fq-coefficient ')' | var ['^' exp]
//! var    := 'x' | 'x1' .. 'x4'
//! exp    := ['-'] digits | '(' ['-'] digits ')'
//! ```
//!
//! Integer coefficients are reduced mod p; `x` is an alias of `x1`.

use super::poly::{coeff_from_string, LaurentPoly};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::geometry::{Exp, MAX_N};
use num_bigint::BigInt;
use std::sync::Arc;

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

impl<'a> Parser<'a> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(start, "expected digits");
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn small_int(&mut self) -> Result<i64> {
        let start = self.pos;
        let d = self.digits()?;
        d.parse::<i64>().ok().filter(|&v| v <= i32::MAX as i64).map_or_else(|| err(start, "integer too large"), Ok)
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let v = self.small_int()?;
        if paren {
            if self.peek() != Some(b')') {
                return err(self.pos, "expected ')'");
            }
            self.pos += 1;
        }
        Ok(if neg { -v } else { v })
    }
}

/// Parsed polynomial before the dimension is fixed.
struct Raw {
    terms: Vec<(Vec<i64>, BigInt, Option<u32>)>,
    max_var: usize,
}

fn parse_raw(text: &str, fq: &Field) -> Result<Raw> {
    let mut ps = Parser { s: text.as_bytes(), pos: 0 };
    let mut terms = Vec::new();
    let mut max_var = 0usize;
    let mut first = true;
    loop {
        let mut sign = 1i64;
        match ps.peek() {
            None if first => return err(ps.pos, "empty polynomial"),
            None => break,
            Some(b'+') => ps.pos += 1,
            Some(b'-') => {
                ps.pos += 1;
                sign = -1;
            }
            Some(_) if first => {}
            Some(c) => return err(ps.pos, format!("expected '+' or '-', found {:?}", c as char)),
        }
        first = false;
        let mut exps = vec![0i64; MAX_N];
        let mut int_coeff = BigInt::from(sign);
        let mut fq_coeff: Option<u32> = None;
        let mut nfactors = 0;
        loop {
            let c = ps.peek();
            if nfactors > 0 && c == Some(b'*') {
                ps.pos += 1;
                if !matches!(ps.peek(), Some(b'x') | Some(b'(') | Some(b'0'..=b'9')) {
                    return err(ps.pos, "expected a factor after '*'");
                }
                continue;
            }
            match c {
                Some(b'0'..=b'9') => {
                    let d = ps.digits()?;
                    int_coeff *= d.parse::<BigInt>().unwrap();
                }
                Some(b'(') => {
                    let start = ps.pos;
                    let close = text[start..].find(')').map(|i| start + i);
                    let Some(close) = close else { return err(start, "unclosed '('") };
                    let inner = &text[start + 1..close];
                    let c = coeff_from_string(fq, inner).map_err(|e| match e {
                        Error::Parse { msg, .. } => Error::Parse { pos: start + 1, msg },
                        other => other,
                    })?;
                    fq_coeff = Some(match fq_coeff {
                        None => c,
                        Some(prev) => fq.mul(prev, c),
                    });
                    ps.pos = close + 1;
                }
                Some(b'x') => {
                    let start = ps.pos;
                    ps.pos += 1;
                    let idx = if ps.s.get(ps.pos).is_some_and(|b| b.is_ascii_digit()) {
                        let i = ps.small_int()? as usize;
                        if i == 0 || i > MAX_N {
                            return err(start, format!("unknown variable x{i}"));
                        }
                        i
                    } else {
                        1
                    };
                    let e = if ps.peek() == Some(b'^') {
                        ps.pos += 1;
                        ps.exponent()?
                    } else {
                        1
                    };
                    exps[idx - 1] += e;
                    max_var = max_var.max(idx);
                }
                Some(b'+') | Some(b'-') | None if nfactors > 0 => break,
                Some(c) => return err(ps.pos, format!("unexpected {:?}", c as char)),
                None => return err(ps.pos, "unexpected end of input"),
            }
            nfactors += 1;
        }
        terms.push((exps, int_coeff, fq_coeff));
    }
    Ok(Raw { terms, max_var })
}

/// Parse `text` into a polynomial over F_q; `n = None` infers the dimension
/// from the largest variable index.
pub fn parse_poly(text: &str, n: Option<usize>, fq: Arc<Field>) -> Result<LaurentPoly> {
    let raw = parse_raw(text, &fq)?;
    let n = match n {
        Some(n) if raw.max_var > n => {
            return Err(Error::Parse { pos: 0, msg: format!("variable x{} exceeds n = {n}", raw.max_var) })
        }
        Some(n) => n,
        None => raw.max_var.max(1),
    };
    let mut f = LaurentPoly::new(n, fq.clone())?;
    let p = BigInt::from(fq.p);
    for (exps, c, fc) in raw.terms {
        let mut u: Exp = [0; MAX_N];
        for j in 0..MAX_N {
            u[j] = i32::try_from(exps[j]).map_err(|_| Error::Parse { pos: 0, msg: "exponent overflow".into() })?;
        }
        let r: BigInt = ((c % &p) + &p) % &p;
        let mut coeff = fq.from_int(i64::try_from(r).unwrap());
        if let Some(fc) = fc {
            coeff = fq.mul(coeff, fc);
        }
        if coeff != 0 {
            f.add_term(u, coeff);
        }
    }
    Ok(f)
}
