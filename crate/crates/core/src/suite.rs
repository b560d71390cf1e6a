//! The fixed example suite: Dwork constants, the curve and comparison-map
//! examples, and NP-agreeability of the Frobenius matrices of small
//! polynomials. Each check yields one row with the expected and observed
//! values.

use crate::charp::{parse_poly, LaurentPoly};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::frobenius::matrices::intertwining_agreement;
use crate::frobenius::{frobenius_matrix, transform_matrix, MatrixKind, Setup};
use crate::geometry::Q;
use crate::io::q_to_string;
use crate::linalg;
use crate::padic::dwork::{gamma_l_ord, DworkConstants};
use crate::padic::Ctx;
use crate::phimod::{check_np_agreeable, FilteredPhiModule};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

impl CheckRow {
    fn new(name: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, pass: bool) -> CheckRow {
        CheckRow { name: name.into(), expected: expected.into(), observed: observed.into(), pass }
    }

    fn q(name: impl Into<String>, expected: Q, observed: Option<Q>) -> CheckRow {
        let obs = observed.map_or("zero at precision".to_string(), |o| q_to_string(&o));
        CheckRow::new(name, q_to_string(&expected), obs, observed == Some(expected))
    }
}

/// Polynomials of the NP-agreeability suite with their primes.
pub const AGREEABLE_SUITE: [(&str, u32); 4] = [("x^2+x", 3), ("x^3+x", 5), ("x^2+x^-1", 5), ("x1^3+x2^3", 7)];

pub fn poly(text: &str, p: u32) -> Result<LaurentPoly> {
    parse_poly(text, None, Arc::new(Field::new(p, 1)?))
}

/// ord(gamma - pi) and ord gamma_l for l <= 3.
pub fn dwork_rows(p: u64, n_out: i64) -> Result<Vec<CheckRow>> {
    let k = Ctx::new(p, 1, 1, n_out)?;
    let dc = DworkConstants::new(&k, 3)?;
    let pp = p as i64;
    let mut rows = vec![CheckRow::q(
        format!("p={p}: ord(gamma - pi)"),
        Q::from_integer(pp - 1) + Q::new(1, pp - 1),
        k.ord(&k.sub(&dc.gamma, &dc.pi)),
    )];
    for l in 0..=3u32 {
        rows.push(CheckRow::q(format!("p={p}: ord gamma_{l}"), gamma_l_ord(p, l), k.ord(&dc.gamma_l[l as usize])));
    }
    Ok(rows)
}

fn exps_1d(s: &Setup) -> Vec<i64> {
    s.basis.exps.iter().map(|u| u[0] as i64).collect()
}

fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort();
    v
}

/// Monomial bases and Hodge-Tate lengths of x^3 + x and x^2 + x^-1 at p = 5.
pub fn curve_rows(n_out: i64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let s = Setup::new(&poly("x^3+x", 5)?, n_out)?;
    let mut w = s.weights();
    w.sort();
    rows.push(CheckRow::new("x^3+x @5: M_NP", "[0, 1, 2]", format!("{:?}", sorted(exps_1d(&s))), sorted(exps_1d(&s)) == vec![0, 1, 2]));
    let want_w = vec![Q::from_integer(0), Q::new(1, 3), Q::new(2, 3)];
    rows.push(CheckRow::new(
        "x^3+x @5: weights",
        "0, 1/3, 2/3",
        w.iter().map(q_to_string).collect::<Vec<_>>().join(", "),
        w == want_w,
    ));
    rows.push(CheckRow::q("x^3+x @5: l_HT", Q::new(2, 3), Some(s.basis.ht_length())));
    let s = Setup::new(&poly("x^2+x^-1", 5)?, n_out)?;
    let e = sorted(exps_1d(&s));
    rows.push(CheckRow::new("x^2+x^-1 @5: |M_NP|", "3", e.len().to_string(), e.len() == 3));
    rows.push(CheckRow::q("x^2+x^-1 @5: l_HT", Q::from_integer(1), Some(s.basis.ht_length())));
    Ok(rows)
}

/// The comparison matrix of x^2 + x: its diagonal, the valuation of the
/// entry from x^0 to x^1, invertibility and the intertwining relation.
pub fn comparison_rows(p: u32, n_out: i64) -> Result<Vec<CheckRow>> {
    let s = Setup::new(&poly("x^2+x", p)?, n_out)?;
    let km = &*s.km;
    let t = transform_matrix(&s, false)?;
    let ti = transform_matrix(&s, true)?;
    let e = exps_1d(&s);
    let i0 = e.iter().position(|&x| x == 0).ok_or_else(|| Error::Verification("x^0 missing from basis".into()))?;
    let i1 = e.iter().position(|&x| x == 1).ok_or_else(|| Error::Verification("x^1 missing from basis".into()))?;
    let mut rows = Vec::new();
    let pp = p as i64;
    // ord(T(i,i) - 1) over the diagonal, None when every entry is 1 at precision
    let gap = (0..e.len()).filter_map(|i| km.ord(&km.sub(&t.entries[i][i], &km.one()))).min();
    let obs = match gap {
        None => "true".to_string(),
        Some(g) => format!("false: min ord(T(i,i) - 1) = {}", q_to_string(&g)),
    };
    rows.push(CheckRow::new(format!("x^2+x @{p}: T(i,i) = 1"), "true", obs, gap.is_none()));
    let floor = Q::from_integer(pp - 2);
    rows.push(CheckRow::new(
        format!("x^2+x @{p}: ord(T(i,i) - 1) >= p - 2"),
        format!(">= {}", pp - 2),
        gap.map_or("exact".to_string(), |g| q_to_string(&g)),
        gap.map_or(true, |g| g >= floor),
    ));
    let t1 = &t.entries[i0][i1];
    rows.push(CheckRow::new(format!("x^2+x @{p}: T_1 != 0"), "true", (!km.is_zero(t1)).to_string(), !km.is_zero(t1)));
    rows.push(CheckRow::q(
        format!("x^2+x @{p}: ord T_1"),
        Q::from_integer(pp - 2) + Q::new(1, 2 * (pp - 1)),
        km.ord(t1),
    ));
    let prod = linalg::mul(km, &t.entries, &ti.entries);
    let id = linalg::identity(km, e.len());
    let ok = linalg::eq_to(km, &prod, &id, (n_out - 2) * km.e);
    rows.push(CheckRow::new(format!("x^2+x @{p}: T T_inv = 1"), "true", ok.to_string(), ok));
    let tilde = frobenius_matrix(&s, MatrixKind::Tilde)?;
    let hat = frobenius_matrix(&s, MatrixKind::Hat)?;
    let inter = intertwining_agreement(&s, &tilde, &hat, &t);
    let want = Q::from_integer(n_out - 2);
    rows.push(CheckRow::new(
        format!("x^2+x @{p}: sigma(T) A-hat = A-tilde T"),
        format!(">= {}", q_to_string(&want)),
        q_to_string(&inter),
        inter >= want,
    ));
    Ok(rows)
}

/// NP-agreeability margins of the tilde matrices, and of the hat matrices
/// when l_HT <= p - 2; t_N = t_H for both.
pub fn agreeable_rows(n_out: i64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (text, p) in AGREEABLE_SUITE {
        let s = Setup::new(&poly(text, p)?, n_out)?;
        let short = s.basis.ht_length() <= Q::from_integer(p as i64 - 2);
        for kind in [MatrixKind::Tilde, MatrixKind::Hat] {
            let fm = frobenius_matrix(&s, kind)?;
            let md = FilteredPhiModule::from_frobenius(&s, &fm)?;
            let c = check_np_agreeable(&md);
            if kind == MatrixKind::Tilde || short {
                rows.push(CheckRow::new(
                    format!("{text} @{p} {}: NP-agreeable margin", kind.name()),
                    ">= 0",
                    q_to_string(&c.margin),
                    c.holds,
                ));
            }
            let tn = md.newton_number().ok();
            let th = md.hodge_number();
            rows.push(CheckRow::q(format!("{text} @{p} {}: t_N = t_H", kind.name()), th, tn));
        }
    }
    Ok(rows)
}
