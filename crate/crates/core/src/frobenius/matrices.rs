//! Matrices of the Frobenius maps and of the comparison map on the monomial
//! basis.
//!
//! Frobenius rows are computed through the Dwork operator alpha =
//! sigma^{-1} psi (G .), G = exp(F - F^sigma(x^p)), which is a left inverse of
//! phi. Its input series S_i = psi(G x^{u_i}) lies in L(p/(p-1), -w_i/(p-1)),
//! so every reduction step moves strictly down in weight. The matrix of phi
//! is then sigma(B)^{-1}.

use super::reduce::{FKind, ReductionDiagnostics, Reducer};
use super::series::{
    artin_hasse_factor, artin_hasse_table, dwork_theta_series, exp_monomial, product, theta_factor, verify_cert,
    Factor, Measure,
};
use super::Setup;
use crate::error::{Error, Result};
use crate::geometry::{exp_add, exp_scale, Exp, Q};
use crate::linalg::{self, Mat};
use crate::padic::scalar::q_floor;
use crate::padic::Scalar;
use num_integer::Integer;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Tilde,
    Hat,
    Transform,
    TransformInv,
}

impl MatrixKind {
    pub fn name(&self) -> &'static str {
        match self {
            MatrixKind::Tilde => "tilde",
            MatrixKind::Hat => "hat",
            MatrixKind::Transform => "transform",
            MatrixKind::TransformInv => "transform_inv",
        }
    }

    pub fn parse(s: &str) -> Result<MatrixKind> {
        match s {
            "tilde" => Ok(MatrixKind::Tilde),
            "hat" => Ok(MatrixKind::Hat),
            "transform" => Ok(MatrixKind::Transform),
            "transform_inv" => Ok(MatrixKind::TransformInv),
            _ => Err(Error::Usage(format!("unknown matrix kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrobeniusMatrix {
    pub kind: MatrixKind,
    pub basis: Vec<Exp>,
    pub weights: Vec<Q>,
    /// over K_m; Frobenius kinds use the basis pi^{p w(u_i)} x^{u_i},
    /// comparison kinds pi^{w(u_i)} x^{u_i}
    pub entries: Mat,
    /// Frobenius kinds: matrix of the Dwork operator alpha in the same basis
    pub alpha: Option<Mat>,
    /// guaranteed precision of `entries`, in ord units
    pub prec: i64,
    pub diagnostics: Vec<ReductionDiagnostics>,
}

impl FrobeniusMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

fn fkind(kind: MatrixKind) -> FKind {
    match kind {
        MatrixKind::Tilde | MatrixKind::TransformInv => FKind::Tilde,
        MatrixKind::Hat | MatrixKind::Transform => FKind::Hat,
    }
}

/// The series G = exp(F - F^sigma(x^p)) as a product of per-monomial factors,
/// truncated at potential `t` in the scale-p measure.
fn dwork_series(setup: &Setup, kind: FKind, t: i64) -> Result<HashMap<Exp, Scalar>> {
    let k = &*setup.k1;
    let poly = &*setup.poly;
    let p = k.p as i64;
    let m = poly.m;
    let meas = Measure { scale: p, m };
    let thresh = t * meas.per_ord(k.p);
    let factors: Vec<Factor> = match kind {
        FKind::Tilde => {
            let ah = artin_hasse_table(k.p, (t * p + 2) as usize);
            setup
                .fhat
                .iter()
                .map(|(u, a)| artin_hasse_factor(k, poly, meas, &setup.dc.gamma, a, u, thresh, &ah))
                .collect::<Result<_>>()?
        }
        FKind::Hat => {
            let rate_p2 = p * m * (p * p - 3 * p + 1);
            let len = (thresh * p * p / rate_p2 + 2) as usize;
            let lambda = dwork_theta_series(k, len);
            setup
                .fhat
                .iter()
                .map(|(u, a)| theta_factor(k, poly, meas, &lambda, a, u, thresh))
                .collect::<Result<_>>()?
        }
    };
    let g = product(k, poly, meas, &factors, thresh);
    let cert = match kind {
        FKind::Tilde => (Q::new(1, p - 1), Q::from_integer(0)),
        FKind::Hat => (Q::new(p - 1, p * p), Q::from_integer(0)),
    };
    verify_cert(k, poly, g.iter(), cert)?;
    Ok(g)
}

/// Matrix of phi-tilde or phi-hat on the basis pi^{p w(u_i)} x^{u_i}.
pub fn frobenius_matrix(setup: &Setup, kind: MatrixKind) -> Result<FrobeniusMatrix> {
    frobenius_matrix_with_cutoff(setup, kind, 0)
}

/// [`frobenius_matrix`] with the series truncation and the reduction
/// threshold raised by `extra` p-adic digits. Any `extra >= 0` is
/// admissible; the result must not depend on it at output precision.
pub fn frobenius_matrix_with_cutoff(setup: &Setup, kind: MatrixKind, extra: i64) -> Result<FrobeniusMatrix> {
    if extra < 0 {
        return Err(Error::Usage("cutoff extension must be nonnegative".into()));
    }
    let fk = match kind {
        MatrixKind::Tilde => FKind::Tilde,
        MatrixKind::Hat => FKind::Hat,
        _ => return Err(Error::Usage("frobenius_matrix takes tilde or hat".into())),
    };
    let k1 = &*setup.k1;
    let km = &*setup.km;
    let p = k1.p as i64;
    let m = setup.poly.m;
    let n = setup.n() as i64;
    let t = setup.n_target + n + extra;
    let g = dwork_series(setup, fk, t)?;
    let red = Reducer::new(setup, fk, t * m * (p - 1))?;
    let basis = &setup.basis;
    let d = basis.len();
    let mut b = linalg::zeros(km, d, d);
    let mut diags = Vec::with_capacity(d);
    for (i, ui) in basis.exps.iter().enumerate() {
        let wi = basis.weight_units[i];
        let terms = g.iter().filter_map(|(kx, c)| {
            let s = exp_add(kx, ui);
            s.iter().all(|x| x.rem_euclid(p as i32) == 0).then(|| (s.map(|x| x.div_euclid(p as i32)), k1.sigma_inv(c)))
        });
        let (c, diag) = red.reduce(terms, t * m * (p - 1) - wi.div_euclid(p))?;
        diags.push(diag);
        for (j, cj) in c.iter().enumerate() {
            let wj = basis.weight_units[j];
            let cap = Integer::div_floor(&((p - 1) * t * m * p - wi + p * wj), &(m * p));
            let cj = k1.with_prec(cj, cap);
            b[i][j] = km.shift(&km.embed(k1, &cj), p * (wi - wj));
        }
    }
    let a = linalg::inverse(km, &linalg::sigma_pow(km, &b, 1))?;
    let prec = q_floor(linalg::min_prec(km, &a));
    if prec < setup.n_out {
        return Err(Error::Precision(format!("Frobenius matrix precision {prec} below N_out = {}", setup.n_out)));
    }
    Ok(FrobeniusMatrix {
        kind,
        basis: basis.exps.clone(),
        weights: basis.weights(),
        entries: a,
        alpha: Some(b),
        prec: setup.n_out,
        diagnostics: diags,
    })
}

/// exp(+-(F-tilde - F-hat)) as a product of per-monomial exponentials,
/// truncated at potential `t` (scale 1).
pub fn comparison_series(setup: &Setup, inverse: bool, t: i64) -> Result<HashMap<Exp, Scalar>> {
    let k = &*setup.k1;
    let poly = &*setup.poly;
    let p = k.p as i64;
    let meas = Measure { scale: 1, m: poly.m };
    let thresh = t * meas.per_ord(k.p);
    let sign = |x: Scalar| if inverse { k.neg(&x) } else { x };
    let gmp = k.sub(&setup.dc.gamma, &setup.dc.pi);
    let mut factors = Vec::new();
    for (u, a) in setup.fhat.iter() {
        factors.push(exp_monomial(k, poly, meas, &sign(k.mul(&gmp, a)), u, thresh)?);
        let mut pl = 1i32;
        for l in 1..=setup.dc.l_max {
            pl *= p as i32;
            let c = sign(k.mul(&setup.dc.gamma_l[l], &k.sigma_pow(a, l as i64)));
            let f = exp_monomial(k, poly, meas, &c, &exp_scale(u, pl), thresh)?;
            if f.terms.len() > 1 {
                factors.push(f);
            }
        }
    }
    let e = product(k, poly, meas, &factors, thresh);
    verify_cert(k, poly, e.iter(), (Q::new(p - 1, p), Q::from_integer(0)))?;
    let zero = [0; crate::geometry::MAX_N];
    verify_cert(k, poly, e.iter().filter(|(u, _)| **u != zero), (Q::new(1, p - 1), Q::from_integer(p - 2)))?;
    Ok(e)
}

/// T (from exp(F-tilde - F-hat), reduced for F-hat) or T_inv (from
/// exp(F-hat - F-tilde), reduced for F-tilde) on the basis pi^{w(u_i)} x^{u_i}.
pub fn transform_matrix(setup: &Setup, inverse: bool) -> Result<FrobeniusMatrix> {
    let k1 = &*setup.k1;
    let km = &*setup.km;
    let p = k1.p as i64;
    let m = setup.poly.m;
    let t = setup.n_target;
    let e = comparison_series(setup, inverse, t)?;
    let kind = if inverse { MatrixKind::TransformInv } else { MatrixKind::Transform };
    let red = Reducer::new(setup, fkind(kind), t * m * (p - 1))?;
    let basis = &setup.basis;
    let d = basis.len();
    let mut out = linalg::zeros(km, d, d);
    let mut diags = Vec::with_capacity(d);
    for (i, ui) in basis.exps.iter().enumerate() {
        let wi = basis.weight_units[i];
        let terms = e.iter().map(|(u, c)| (exp_add(u, ui), c.clone()));
        let (c, diag) = red.reduce(terms, t * m * (p - 1) - wi)?;
        diags.push(diag);
        for (j, cj) in c.iter().enumerate() {
            let wj = basis.weight_units[j];
            let cap = Integer::div_floor(&((p - 1) * t * m - wi + wj), &m);
            let cj = k1.with_prec(cj, cap);
            out[i][j] = km.shift(&km.embed(k1, &cj), wi - wj);
        }
    }
    let prec = q_floor(linalg::min_prec(km, &out));
    if prec < setup.n_out {
        return Err(Error::Precision(format!("comparison matrix precision {prec} below N_out = {}", setup.n_out)));
    }
    Ok(FrobeniusMatrix {
        kind,
        basis: basis.exps.clone(),
        weights: basis.weights(),
        entries: out,
        alpha: None,
        prec: setup.n_out,
        diagnostics: diags,
    })
}

/// Comparison matrix rewritten on the basis pi^{p w(u_i)} x^{u_i}:
/// entry (i,j) times pi^{(p-1)(w_i - w_j)}.
pub fn rescale_transform(setup: &Setup, t: &Mat) -> Mat {
    let km = &*setup.km;
    let p = km.p as i64;
    let w = &setup.basis.weight_units;
    t.iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, x)| km.shift(x, (p - 1) * (w[i] - w[j]))).collect())
        .collect()
}

/// Smallest ord of the entries of sigma(T') A-hat - A-tilde T', with T' the
/// rescaled comparison matrix; the relation phi-hat T = T phi-tilde holds to
/// this precision. Exact agreement at the working precision reports the
/// precision of the difference.
pub fn intertwining_agreement(setup: &Setup, tilde: &FrobeniusMatrix, hat: &FrobeniusMatrix, t: &FrobeniusMatrix) -> Q {
    let km = &*setup.km;
    let te = rescale_transform(setup, &t.entries);
    let lhs = linalg::mul(km, &linalg::sigma_pow(km, &te, 1), &hat.entries);
    let rhs = linalg::mul(km, &tilde.entries, &te);
    let diff = linalg::sub(km, &lhs, &rhs);
    diff.iter()
        .flatten()
        .map(|x| km.ord(x).unwrap_or_else(|| km.prec_ord(x)))
        .min()
        .unwrap_or(Q::from_integer(0))
}

/// Coefficients [1, c_1, ..., c_d] of det(1 - T B sigma(B) ... sigma^{a-1}(B))
/// for the Dwork operator matrix B.
pub fn l_polynomial_from_frobenius(setup: &Setup, fm: &FrobeniusMatrix) -> Result<Vec<Scalar>> {
    let km = &*setup.km;
    let b = fm.alpha.as_ref().ok_or_else(|| Error::Usage("not a Frobenius matrix".into()))?;
    let mut phi = b.clone();
    for s in 1..km.a as i64 {
        phi = linalg::mul(km, &phi, &linalg::sigma_pow(km, b, s));
    }
    Ok(linalg::charpoly_reversed(km, &phi))
}
