//! Filtered Phi-modules over K_m: Hodge and Newton data, agreeable bases and
//! weak admissibility.
//!
//! Conventions. A module has basis e_1..e_d with Hodge-Tate weights ht_j and
//! the filtration F^i = span{e_j : ht_j >= i}. For Newton polyhedron modules
//! ht_j = -w(u_j) and the basis is in NP order (w descending, so ht
//! ascending); this order is required. Filtration-generating bases are listed
//! with w ascending. Frobenius matrices use rows: phi(e_i) = sum_j A(i,j) e_j.

pub mod polygon;
mod quasi_np;

pub use polygon::{newton_polygon_of, Convention, Polygon};
pub use quasi_np::{is_quasi_np, leading_power, quasi_np_basis};

use crate::error::{Error, Result};
use crate::frobenius::{FrobeniusMatrix, Setup};
use crate::geometry::Exp;
use crate::linalg::{self, Mat};
use crate::padic::scalar::PREC_INF;
use crate::padic::{Ctx, Scalar, Q};
use num_integer::Integer;
use serde::Serialize;
use std::sync::Arc;

/// Basis scaling of the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// basis pi^{p w(u)} x^u
    Np,
    /// basis x^u
    Classical,
}

impl Normalization {
    pub fn parse(s: &str) -> Result<Normalization> {
        match s {
            "np" => Ok(Normalization::Np),
            "classical" => Ok(Normalization::Classical),
            _ => Err(Error::Usage(format!("unknown normalization {s:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Normalization::Np => "np",
            Normalization::Classical => "classical",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FilteredPhiModule {
    pub k: Arc<Ctx>,
    pub ht_weights: Vec<Q>,
    pub matrix: Mat,
    /// q = p^a; phi is sigma-semilinear
    pub a: usize,
    pub normalization: Normalization,
    /// absolute precision of the matrix entries, in ord units
    pub prec: i64,
    /// monomial labels and number of variables, when the module comes from a polynomial
    pub exps: Option<(usize, Vec<Exp>)>,
}

/// Default precision slack for phi-stability tests.
pub const STABILITY_SLACK: i64 = 2;

impl FilteredPhiModule {
    pub fn new(
        k: Arc<Ctx>,
        ht_weights: Vec<Q>,
        matrix: Mat,
        normalization: Normalization,
        prec: i64,
    ) -> Result<FilteredPhiModule> {
        let d = ht_weights.len();
        if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(Error::Domain(format!("matrix is not {d} x {d}")));
        }
        if ht_weights.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("Hodge-Tate weights must be listed in ascending order".into()));
        }
        if let Some(h) = ht_weights.iter().find(|h| k.m % h.denom() != 0) {
            return Err(Error::Domain(format!("Hodge-Tate weight {h} has denominator not dividing m = {}", k.m)));
        }
        if matrix.iter().flatten().any(|x| !k.owns(x)) {
            return Err(Error::Domain("matrix entries belong to another field context".into()));
        }
        let a = k.a;
        let out = FilteredPhiModule { k, ht_weights, matrix, a, normalization, prec, exps: None };
        if d > 0 && out.k.is_zero(&linalg::det(&out.k, &out.matrix)) {
            return Err(Error::Precision("Frobenius matrix is singular at precision".into()));
        }
        Ok(out)
    }

    /// The module (V_NP,m, phi, F_NP) of a Frobenius matrix of tilde or hat kind.
    pub fn from_frobenius(setup: &Setup, fm: &FrobeniusMatrix) -> Result<FilteredPhiModule> {
        if fm.alpha.is_none() {
            return Err(Error::Usage("not a Frobenius matrix".into()));
        }
        let ht: Vec<Q> = fm.weights.iter().map(|w| -w).collect();
        let mut out = Self::new(setup.km.clone(), ht, fm.entries.clone(), Normalization::Np, fm.prec)?;
        out.exps = Some((setup.n(), fm.basis.clone()));
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.ht_weights.len()
    }

    /// w(u_j) = -ht_j
    pub fn w(&self, j: usize) -> Q {
        -self.ht_weights[j]
    }

    fn w_units(&self, j: usize) -> i64 {
        let w = self.w(j) * Q::from_integer(self.k.m);
        assert!(w.is_integer());
        w.to_integer()
    }

    /// Same module with the matrix rewritten on the basis pi^{p w(u)} x^u.
    pub fn to_np(&self) -> FilteredPhiModule {
        if self.normalization == Normalization::Np {
            return self.clone();
        }
        self.rescaled(Normalization::Np, 1)
    }

    /// Same module on the basis x^u.
    pub fn to_classical(&self) -> FilteredPhiModule {
        if self.normalization == Normalization::Classical {
            return self.clone();
        }
        self.rescaled(Normalization::Classical, -1)
    }

    // v_i = pi^{p w_i} e_i gives A_np(i,j) = pi^{p(w_i - w_j)} A_cl(i,j); sigma fixes pi.
    fn rescaled(&self, to: Normalization, sign: i64) -> FilteredPhiModule {
        let p = self.k.p as i64;
        let d = self.dim();
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                let s = sign * p * (self.w_units(i) - self.w_units(j));
                out.matrix[i][j] = self.k.shift(&self.matrix[i][j], s);
            }
        }
        out.normalization = to;
        out
    }

    /// t_H = sum of the Hodge-Tate weights.
    pub fn hodge_number(&self) -> Q {
        self.ht_weights.iter().sum()
    }

    /// t_N = ord det A. The diagonal rescaling between normalizations is
    /// sigma-invariant, so both tags give the same value.
    pub fn newton_number(&self) -> Result<Q> {
        let det = linalg::det(&self.k, &self.matrix);
        self.k.ord(&det).ok_or_else(|| Error::Precision("determinant is zero at precision".into()))
    }

    pub fn ht_length(&self) -> Q {
        let mx = self.ht_weights.iter().max().copied().unwrap_or(Q::from_integer(0));
        let mn = self.ht_weights.iter().min().copied().unwrap_or(Q::from_integer(0));
        mx - mn
    }

    pub fn hodge_polygon(&self, convention: Convention) -> Polygon {
        match convention {
            Convention::Internal => Polygon::from_slopes(convention, &self.ht_weights),
            Convention::Classical => {
                let w: Vec<Q> = self.ht_weights.iter().map(|h| -h).collect();
                Polygon::from_slopes(convention, &w)
            }
        }
    }

    /// Matrix of phi^a: sigma^{a-1}(A) ... sigma(A) A.
    pub fn frobenius_q(&self) -> Mat {
        let k = &*self.k;
        let mut acc = self.matrix.clone();
        for s in 1..self.a as i64 {
            acc = linalg::mul(k, &linalg::sigma_pow(k, &self.matrix, s), &acc);
        }
        acc
    }

    /// Newton polygon of det(1 - T Phi_q) with slopes in ord_q; the classical
    /// polygon is its negation. Slope denominators are checked against
    /// m a (p-1) d.
    pub fn newton_polygon(&self, convention: Convention) -> Result<Polygon> {
        let k = &*self.k;
        let cp = linalg::charpoly_reversed(k, &self.frobenius_q());
        let internal = newton_polygon_of(k, &cp, self.a, Convention::Internal)?;
        let bound = k.m * self.a as i64 * (k.p as i64 - 1) * self.dim().max(1) as i64;
        if internal.max_slope_denominator() > bound {
            return Err(Error::Verification(format!(
                "Newton slope denominator {} exceeds m a (p-1) d = {bound}",
                internal.max_slope_denominator()
            )));
        }
        Ok(match convention {
            Convention::Internal => internal,
            Convention::Classical => internal.negated(),
        })
    }

    /// phi applied to the coordinate vector v.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let k = &*self.k;
        let d = self.dim();
        let mut out = vec![k.zero(); d];
        for (i, vi) in v.iter().enumerate() {
            if k.is_zero(vi) {
                continue;
            }
            let s = k.sigma(vi);
            for j in 0..d {
                out[j] = k.add(&out[j], &k.mul(&s, &self.matrix[i][j]));
            }
        }
        out
    }

    /// w(v): largest w(u_j) over the coordinates of v that are nonzero at precision.
    pub fn vector_weight(&self, v: &[Scalar]) -> Option<Q> {
        (0..self.dim()).filter(|&j| !self.k.is_zero(&v[j])).map(|j| self.w(j)).max()
    }
}

/// ord of a scalar, or its precision when it is zero at precision; None for
/// exact zeros.
pub fn ord_bound(k: &Ctx, x: &Scalar) -> Option<Q> {
    match k.ord(x) {
        Some(o) => Some(o),
        None if k.prec_units(x) >= PREC_INF => None,
        None => Some(k.prec_ord(x)),
    }
}

/// Result of a margin test: holds iff margin >= 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginCheck {
    pub holds: bool,
    #[serde(serialize_with = "crate::io::ser_q")]
    pub margin: Q,
}

/// min over (i,j) of ord A_NP(i,j) + w(u_j); entries zero at precision count
/// with their precision bound.
pub fn check_np_agreeable(module: &FilteredPhiModule) -> MarginCheck {
    let md = module.to_np();
    let k = &*md.k;
    let d = md.dim();
    let mut margin: Option<Q> = None;
    for i in 0..d {
        for j in 0..d {
            let Some(o) = ord_bound(k, &md.matrix[i][j]) else { continue };
            let s = o + md.w(j);
            margin = Some(margin.map_or(s, |m: Q| m.min(s)));
        }
    }
    let margin = margin.unwrap_or(Q::from_integer(0));
    MarginCheck { holds: margin >= Q::from_integer(0), margin }
}

/// Slack of ord T(i,j) + ord T_inv(i',j') >= w(u_j) - w(u_i) over all
/// quadruples. The right side depends on (i,j) only, so the minimum splits
/// into min_{i,j}(ord T(i,j) - w_j + w_i) + min_{i',j'} ord T_inv(i',j').
/// `weights` are the w(u_i) (not Hodge-Tate weights).
pub fn check_np_dominating(k: &Ctx, t: &Mat, t_inv: &Mat, weights: &[Q]) -> MarginCheck {
    let d = weights.len();
    let mut first: Option<Q> = None;
    for i in 0..d {
        for j in 0..d {
            let Some(o) = ord_bound(k, &t[i][j]) else { continue };
            let s = o - weights[j] + weights[i];
            first = Some(first.map_or(s, |m: Q| m.min(s)));
        }
    }
    let second = t_inv.iter().flatten().filter_map(|x| ord_bound(k, x)).min();
    let margin = match (first, second) {
        (Some(a), Some(b)) => a + b,
        _ => Q::from_integer(0),
    };
    MarginCheck { holds: margin >= Q::from_integer(0), margin }
}

/// Echelon form of a list of row vectors, columns processed in basis order
/// (w descending). `u` records the row operations: rows = u * input.
pub(crate) struct Echelon {
    pub rows: Mat,
    pub pivots: Vec<usize>,
    pub u: Mat,
}

pub(crate) fn echelon(k: &Ctx, vecs: &Mat) -> Result<Echelon> {
    let r = vecs.len();
    let d = vecs.first().map_or(0, |v| v.len());
    let mut rows = vecs.clone();
    let mut u = linalg::identity(k, r);
    let mut remaining: Vec<usize> = (0..r).collect();
    let mut order = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..d {
        let best = remaining
            .iter()
            .enumerate()
            .filter(|(_, &ri)| !k.is_zero(&rows[ri][c]))
            .min_by_key(|(_, &ri)| k.val_units(&rows[ri][c]).unwrap());
        let Some((pos, &pr)) = best else { continue };
        remaining.remove(pos);
        let inv = k.inv(&rows[pr][c])?;
        for &ri in &remaining {
            if k.is_zero(&rows[ri][c]) {
                continue;
            }
            let f = k.mul(&rows[ri][c], &inv);
            for j in 0..d {
                let t = k.mul(&f, &rows[pr][j]);
                rows[ri][j] = k.sub(&rows[ri][j], &t);
            }
            for j in 0..r {
                let t = k.mul(&f, &u[pr][j]);
                u[ri][j] = k.sub(&u[ri][j], &t);
            }
        }
        order.push(pr);
        pivots.push(c);
    }
    if !remaining.is_empty() {
        return Err(Error::Domain("vectors are linearly dependent at precision".into()));
    }
    Ok(Echelon {
        rows: order.iter().map(|&i| rows[i].clone()).collect(),
        u: order.iter().map(|&i| u[i].clone()).collect(),
        pivots,
    })
}

impl Echelon {
    /// Coefficients x with x * input = target, and the residual.
    pub fn solve(&self, k: &Ctx, target: &[Scalar]) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
        let mut t = target.to_vec();
        let r = self.rows.len();
        let mut y = Vec::with_capacity(r);
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let yc = k.div(&t[c], &row[c])?;
            for (tj, rj) in t.iter_mut().zip(row) {
                *tj = k.sub(tj, &k.mul(&yc, rj));
            }
            y.push(yc);
        }
        let mut x = vec![k.zero(); r];
        for (yr, ur) in y.iter().zip(&self.u) {
            for (xj, uj) in x.iter_mut().zip(ur) {
                *xj = k.add(xj, &k.mul(yr, uj));
            }
        }
        Ok((x, t))
    }
}

/// Filtration-generating basis of span(vecs) for the subspace filtration,
/// listed with w ascending, with the weight of each vector.
pub fn filtration_basis(module: &FilteredPhiModule, vecs: &Mat) -> Result<(Mat, Vec<Q>)> {
    let e = echelon(&module.k, vecs)?;
    let mut rows = e.rows;
    let mut ws: Vec<Q> = e.pivots.iter().map(|&c| module.w(c)).collect();
    rows.reverse();
    ws.reverse();
    Ok((rows, ws))
}

/// t_H of span(vecs) with the subspace filtration.
pub fn subspace_hodge_number(module: &FilteredPhiModule, vecs: &Mat) -> Result<Q> {
    let (_, ws) = filtration_basis(module, vecs)?;
    Ok(-ws.iter().sum::<Q>())
}

/// True when `basis` (w ascending) generates the subspace filtration of its span.
pub fn is_filtration_generating(module: &FilteredPhiModule, basis: &Mat) -> Result<bool> {
    let mut ws = Vec::with_capacity(basis.len());
    for v in basis {
        ws.push(module.vector_weight(v).ok_or_else(|| Error::Domain("zero vector in basis".into()))?);
    }
    if ws.windows(2).any(|w| w[0] > w[1]) {
        return Ok(false);
    }
    let (_, jumps) = filtration_basis(module, basis)?;
    Ok(jumps == ws)
}

/// Matrix B of phi restricted to span(basis): phi(v_i) = sum_j B(i,j) v_j.
/// Fails when some phi(v_i) leaves the span by more than the precision slack.
pub fn restricted_matrix(module: &FilteredPhiModule, basis: &Mat, slack: i64) -> Result<Mat> {
    let k = &*module.k;
    let e = echelon(k, basis)?;
    let tol = Q::from_integer(module.prec - slack);
    let mut out = Vec::with_capacity(basis.len());
    for (i, v) in basis.iter().enumerate() {
        let (x, res) = e.solve(k, &module.apply(v))?;
        if let Some(worst) = res.iter().filter_map(|r| k.ord(r)).min() {
            if worst < tol {
                return Err(Error::Domain(format!(
                    "subspace is not phi-stable: residual of phi(v_{}) has ord {worst} < {tol}",
                    i + 1
                )));
            }
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreeableCheck {
    pub holds: bool,
    /// min over (i,j) of ord A_phi(v_i, v_j) - w_HT(v_j)
    #[serde(serialize_with = "crate::io::ser_q")]
    pub margin: Q,
}

/// Agreeable test for a filtration-generating basis of a phi-stable subspace.
pub fn check_agreeable_basis(module: &FilteredPhiModule, basis: &Mat) -> Result<AgreeableCheck> {
    if !is_filtration_generating(module, basis)? {
        return Err(Error::Domain("basis is not filtration-generating".into()));
    }
    let k = &*module.k;
    let b = restricted_matrix(module, basis, STABILITY_SLACK)?;
    let ht: Vec<Q> = basis.iter().map(|v| -module.vector_weight(v).unwrap()).collect();
    let mut margin: Option<Q> = None;
    for row in &b {
        for (j, x) in row.iter().enumerate() {
            let Some(o) = ord_bound(k, x) else { continue };
            let s = o - ht[j];
            margin = Some(margin.map_or(s, |m: Q| m.min(s)));
        }
    }
    let margin = margin.unwrap_or(Q::from_integer(0));
    Ok(AgreeableCheck { holds: margin >= Q::from_integer(0), margin })
}

/// A candidate subspace for the weak-admissibility test.
#[derive(Clone, Debug)]
pub struct SubspaceSpec {
    pub vectors: Mat,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CandidateOutcome {
    Checked {
        label: String,
        dim: usize,
        #[serde(serialize_with = "crate::io::ser_q")]
        t_n: Q,
        #[serde(serialize_with = "crate::io::ser_q")]
        t_h: Q,
    },
    Rejected {
        label: String,
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WAVerdict {
    ProvedWa,
    Falsified {
        witness: String,
        #[serde(serialize_with = "crate::io::ser_q")]
        t_n: Q,
        #[serde(serialize_with = "crate::io::ser_q")]
        t_h: Q,
    },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WAReport {
    pub verdict: WAVerdict,
    pub np_agreeable: MarginCheck,
    #[serde(serialize_with = "crate::io::ser_q")]
    pub t_n: Q,
    #[serde(serialize_with = "crate::io::ser_q")]
    pub t_h: Q,
    pub candidates: Vec<CandidateOutcome>,
}

/// Weak admissibility: ProvedWA when the matrix is NP-agreeable and
/// t_N = t_H on the whole module (every subobject then has an agreeable
/// quasi-NP basis); Falsified when the whole module or a phi-stable candidate
/// has t_N below t_H (or t_N != t_H on the whole); Inconclusive otherwise.
pub fn weak_admissibility_report(module: &FilteredPhiModule, candidates: &[SubspaceSpec]) -> Result<WAReport> {
    let t_n = module.newton_number()?;
    let t_h = module.hodge_number();
    let agree = check_np_agreeable(module);
    let mut outcomes = Vec::with_capacity(candidates.len());
    let mut witness: Option<(String, Q, Q)> = None;
    if t_n != t_h {
        witness = Some(("whole module".into(), t_n, t_h));
    }
    for c in candidates {
        match candidate_numbers(module, &c.vectors) {
            Ok((tn, th)) => {
                if tn < th && witness.is_none() {
                    witness = Some((c.label.clone(), tn, th));
                }
                outcomes.push(CandidateOutcome::Checked { label: c.label.clone(), dim: c.vectors.len(), t_n: tn, t_h: th });
            }
            Err(e) => outcomes.push(CandidateOutcome::Rejected { label: c.label.clone(), reason: e.to_string() }),
        }
    }
    let verdict = if let Some((w, tn, th)) = witness {
        WAVerdict::Falsified { witness: w, t_n: tn, t_h: th }
    } else if agree.holds {
        WAVerdict::ProvedWa
    } else {
        WAVerdict::Inconclusive
    };
    Ok(WAReport { verdict, np_agreeable: agree, t_n, t_h, candidates: outcomes })
}

/// (t_N, t_H) of a phi-stable subspace with the subspace filtration.
pub fn candidate_numbers(module: &FilteredPhiModule, vecs: &Mat) -> Result<(Q, Q)> {
    let b = restricted_matrix(module, vecs, STABILITY_SLACK)?;
    let det = linalg::det(&module.k, &b);
    let tn = module.k.ord(&det).ok_or_else(|| Error::Precision("restricted determinant is zero at precision".into()))?;
    Ok((tn, subspace_hodge_number(module, vecs)?))
}

/// Candidate subspaces that come for free: the phi-cyclic span of each basis
/// vector and the coordinate spans F^i of the filtration.
pub fn auto_candidates(module: &FilteredPhiModule) -> Vec<SubspaceSpec> {
    let k = &*module.k;
    let d = module.dim();
    let mut out = Vec::new();
    for i in 0..d {
        let mut v = vec![k.zero(); d];
        v[i] = k.one();
        let mut vecs = vec![v];
        while vecs.len() < d {
            let next = module.apply(vecs.last().unwrap());
            let mut trial = vecs.clone();
            trial.push(next);
            if echelon(k, &trial).is_err() {
                break;
            }
            vecs = trial;
        }
        out.push(SubspaceSpec { vectors: vecs, label: format!("phi-cyclic span of e_{}", i + 1) });
    }
    let mut start = 0;
    while start < d {
        let vecs: Mat = (start..d)
            .map(|j| {
                let mut v = vec![k.zero(); d];
                v[j] = k.one();
                v
            })
            .collect();
        out.push(SubspaceSpec { vectors: vecs, label: format!("F^{}", module.ht_weights[start]) });
        let h = module.ht_weights[start];
        while start < d && module.ht_weights[start] == h {
            start += 1;
        }
    }
    out
}

/// Tensor product. Contexts must share p and a; the result lives over
/// K_lcm(m). Weights add; the basis is re-sorted to NP order (stable).
pub fn tensor(a: &FilteredPhiModule, b: &FilteredPhiModule) -> Result<FilteredPhiModule> {
    if a.k.p != b.k.p || a.a != b.a {
        return Err(Error::Domain("tensor factors must share p and a".into()));
    }
    if a.normalization != b.normalization {
        return Err(Error::Domain("tensor factors must share the basis normalization".into()));
    }
    let m = a.k.m.lcm(&b.k.m);
    let prec = a.prec.min(b.prec);
    let k = if m == a.k.m { a.k.clone() } else { Ctx::with_ring(a.k.zq.clone(), m, a.k.n_work) };
    let ma = if Arc::ptr_eq(&k, &a.k) { a.matrix.clone() } else { linalg::embed(&k, &a.k, &a.matrix) };
    let mb = linalg::embed(&k, &b.k, &b.matrix);
    let kr = linalg::kronecker(&k, &ma, &mb);
    let (da, db) = (a.dim(), b.dim());
    let mut ht = Vec::with_capacity(da * db);
    for x in 0..da {
        for y in 0..db {
            ht.push(a.ht_weights[x] + b.ht_weights[y]);
        }
    }
    let mut perm: Vec<usize> = (0..da * db).collect();
    perm.sort_by_key(|&i| ht[i]);
    let matrix: Mat = perm.iter().map(|&i| perm.iter().map(|&j| kr[i][j].clone()).collect()).collect();
    let ht_sorted: Vec<Q> = perm.iter().map(|&i| ht[i]).collect();
    let exps = match (&a.exps, &b.exps) {
        (Some((na, ea)), Some((nb, eb))) if na + nb <= crate::geometry::MAX_N => {
            let mut v = Vec::with_capacity(da * db);
            for x in ea {
                for y in eb {
                    let mut u = *x;
                    u[*na..na + nb].copy_from_slice(&y[..*nb]);
                    v.push(u);
                }
            }
            Some((na + nb, perm.iter().map(|&i| v[i]).collect()))
        }
        _ => None,
    };
    let mut out = FilteredPhiModule::new(k, ht_sorted, matrix, a.normalization, prec)?;
    out.exps = exps;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeMonotonicity {
    #[serde(serialize_with = "crate::io::ser_q")]
    pub t_h_source: Q,
    #[serde(serialize_with = "crate::io::ser_q")]
    pub t_h_target: Q,
    /// the inverse map is filtration-compatible too
    pub filtered_isomorphism: bool,
    /// t_H(source) <= t_H(target), with equality exactly for filtered isomorphisms
    pub holds: bool,
}

fn compatible(k: &Ctx, map: &Mat, ht_src: &[Q], ht_dst: &[Q]) -> bool {
    map.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, x)| k.is_zero(x) || ht_dst[j] >= ht_src[i]))
}

/// Checks t_H(source) <= t_H(target) for a filtration-compatible bijection
/// source -> target with matrix rows map(e'_i) = sum_j M(i,j) e_j.
pub fn hodge_monotonicity_check(
    source: &FilteredPhiModule,
    target: &FilteredPhiModule,
    map: &Mat,
) -> Result<HodgeMonotonicity> {
    let k = &*target.k;
    let d = target.dim();
    if source.dim() != d || map.len() != d || map.iter().any(|r| r.len() != d) {
        return Err(Error::Domain("map is not a square matrix between equal dimensions".into()));
    }
    if !compatible(k, map, &source.ht_weights, &target.ht_weights) {
        return Err(Error::Domain("map is not filtration-compatible".into()));
    }
    let inv = linalg::inverse(k, map).map_err(|_| Error::Domain("map is not bijective at precision".into()))?;
    let filtered_isomorphism = compatible(k, &inv, &target.ht_weights, &source.ht_weights);
    let (s, t) = (source.hodge_number(), target.hodge_number());
    let holds = s <= t && ((s == t) == filtered_isomorphism);
    Ok(HodgeMonotonicity { t_h_source: s, t_h_target: t, filtered_isomorphism, holds })
}

#[cfg(test)]
mod tests;
