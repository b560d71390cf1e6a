//! JSON encodings of scalars, matrices, modules, polyhedra and polynomials.
//! Rationals are always exact "r/s" strings.

use crate::charp::poly::{coeff_from_string, coeff_to_string};
use crate::charp::LaurentPoly;
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::frobenius::{FrobeniusMatrix, MatrixKind};
use crate::geometry::{exp_from, Exp, Facet, NewtonPolyhedron, SupportSet, MAX_N};
use crate::linalg::Mat;
use crate::padic::scalar::PREC_INF;
use crate::padic::{Ctx, Scalar, Q};
use crate::phimod::{FilteredPhiModule, Normalization};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Largest p, a and m accepted from JSON input.
const MAX_P: u64 = 1000;
const MAX_A: u64 = 8;
const MAX_M: i64 = 64;
const MAX_PREC: i64 = 400;

fn jerr(e: serde_json::Error) -> Error {
    Error::Parse { pos: e.column(), msg: e.to_string() }
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse { pos: 0, msg: msg.into() }
}

pub fn q_to_string(q: &Q) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn ser_q<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q_to_string(q))
}

pub fn ser_q_vec<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(q_to_string))
}

pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || perr(format!("bad rational {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (t.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d <= 0 || n.checked_abs().is_none() || n.abs() > 1 << 40 || d > 1 << 40 {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

// ---------------------------------------------------------------- scalars

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrecJson {
    Int(i64),
    Str(String),
}

/// {"val": "r/s" | null, "terms": [[j, "c0 + c1*X"], ...], "prec": N | "r/s" | "inf"}
/// with j the exponent of pi_m and val, prec in ord units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub val: Option<String>,
    pub terms: Vec<(i64, String)>,
    pub prec: PrecJson,
}

pub fn scalar_to_json(k: &Ctx, x: &Scalar) -> ScalarJson {
    let prec = k.prec_units(x);
    let prec = if prec >= PREC_INF {
        PrecJson::Str("inf".into())
    } else {
        let q = Q::new(prec, k.e);
        if q.is_integer() {
            PrecJson::Int(q.to_integer())
        } else {
            PrecJson::Str(q_to_string(&q))
        }
    };
    ScalarJson { val: k.ord(x).map(|o| q_to_string(&o)), terms: k.terms(x), prec }
}

/// Integer coefficients of "c0 + c1*X + c2*X^3".
fn parse_zq_poly(s: &str, a: usize) -> Result<Vec<BigInt>> {
    let bad = |m: &str| perr(format!("coefficient {s:?}: {m}"));
    let mut out = vec![BigInt::zero(); a];
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad("empty"));
    }
    for part in t.split('+') {
        if part.is_empty() {
            return Err(bad("empty term"));
        }
        let (c, e) = match part.split_once('X') {
            None => (part, 0usize),
            Some((c, rest)) => {
                let c = c.strip_suffix('*').unwrap_or(c);
                let c = if c.is_empty() { "1" } else { c };
                let e = match rest.strip_prefix('^') {
                    Some(e) => e.parse::<usize>().map_err(|_| bad("bad exponent"))?,
                    None if rest.is_empty() => 1,
                    None => return Err(bad("trailing characters")),
                };
                (c, e)
            }
        };
        if e >= a {
            return Err(bad("degree exceeds a - 1"));
        }
        if c.len() > 60 || !c.chars().all(|ch| ch.is_ascii_digit()) {
            return Err(bad("coefficients must be nonnegative integers"));
        }
        out[e] += c.parse::<BigInt>().map_err(|_| bad("bad integer"))?;
    }
    Ok(out)
}

pub fn scalar_from_json(k: &Ctx, j: &ScalarJson) -> Result<Scalar> {
    let prec_units = match &j.prec {
        PrecJson::Int(n) => {
            if n.abs() > MAX_PREC {
                return Err(perr("precision out of range"));
            }
            n * k.e
        }
        PrecJson::Str(s) if s == "inf" => PREC_INF,
        PrecJson::Str(s) => {
            let q = parse_q(s)? * Q::from_integer(k.e);
            if !q.is_integer() || q.to_integer().abs() > MAX_PREC * k.e {
                return Err(perr(format!("precision {s:?} is not a multiple of 1/{}", k.e)));
            }
            q.to_integer()
        }
    };
    let mut terms = Vec::with_capacity(j.terms.len());
    for (e, c) in &j.terms {
        if e.abs() > MAX_PREC * k.e {
            return Err(perr("term exponent out of range"));
        }
        terms.push((*e, parse_zq_poly(c, k.a)?));
    }
    let x = k.from_terms(&terms, prec_units)?;
    let val = k.ord(&x).map(|o| q_to_string(&o));
    if let Some(v) = &j.val {
        if val.as_deref() != Some(v.as_str()) && !(val.is_none() && v.is_empty()) {
            return Err(perr(format!("val {v:?} disagrees with the terms ({val:?})")));
        }
    }
    Ok(x)
}

pub fn parse_scalar_json(k: &Ctx, text: &str) -> Result<Scalar> {
    let j: ScalarJson = serde_json::from_str(text).map_err(jerr)?;
    scalar_from_json(k, &j)
}

fn mat_to_json(k: &Ctx, a: &Mat) -> Vec<Vec<ScalarJson>> {
    a.iter().map(|r| r.iter().map(|x| scalar_to_json(k, x)).collect()).collect()
}

fn mat_from_json(k: &Ctx, rows: &[Vec<ScalarJson>]) -> Result<Mat> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(perr("matrix is not square"));
    }
    rows.iter().map(|r| r.iter().map(|x| scalar_from_json(k, x)).collect()).collect()
}

// --------------------------------------------------------------- matrices

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub exp: Vec<i64>,
    pub weight: String,
}

/// {"kind": "...", "basis": [{"exp": [...], "weight": "r/s"}], "entries": [[scalar]], "prec": N}
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub kind: String,
    pub basis: Vec<BasisEntry>,
    pub entries: Vec<Vec<ScalarJson>>,
    pub prec: i64,
}

pub fn matrix_to_json(k: &Ctx, n: usize, fm: &FrobeniusMatrix) -> MatrixJson {
    MatrixJson {
        kind: fm.kind.name().into(),
        basis: fm
            .basis
            .iter()
            .zip(&fm.weights)
            .map(|(u, w)| BasisEntry { exp: u[..n].iter().map(|&x| x as i64).collect(), weight: q_to_string(w) })
            .collect(),
        entries: mat_to_json(k, &fm.entries),
        prec: fm.prec,
    }
}

/// A decoded matrix document.
#[derive(Clone, Debug)]
pub struct DecodedMatrix {
    pub kind: MatrixKind,
    pub basis: Vec<Exp>,
    pub weights: Vec<Q>,
    pub entries: Mat,
    pub prec: i64,
}

pub fn parse_matrix_json(k: &Ctx, text: &str) -> Result<DecodedMatrix> {
    let j: MatrixJson = serde_json::from_str(text).map_err(jerr)?;
    let kind = MatrixKind::parse(&j.kind).map_err(|e| perr(e.to_string()))?;
    if j.basis.len() != j.entries.len() {
        return Err(perr("basis and matrix sizes differ"));
    }
    let mut basis = Vec::with_capacity(j.basis.len());
    let mut weights = Vec::with_capacity(j.basis.len());
    for b in &j.basis {
        basis.push(exp_from(&b.exp).map_err(|e| perr(e.to_string()))?);
        weights.push(parse_q(&b.weight)?);
    }
    let entries = mat_from_json(k, &j.entries)?;
    Ok(DecodedMatrix { kind, basis, weights, entries, prec: j.prec })
}

// ---------------------------------------------------------------- modules

/// {"p", "a", "m", "ht_weights": ["0", "-1/2"], "matrix": [[scalar]], "normalization": "np", "prec": N}
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub p: u64,
    pub a: u64,
    pub m: i64,
    pub ht_weights: Vec<String>,
    pub matrix: Vec<Vec<ScalarJson>>,
    pub normalization: String,
    #[serde(default)]
    pub prec: Option<i64>,
}

pub fn module_to_json(md: &FilteredPhiModule) -> ModuleJson {
    ModuleJson {
        p: md.k.p,
        a: md.a as u64,
        m: md.k.m,
        ht_weights: md.ht_weights.iter().map(q_to_string).collect(),
        matrix: mat_to_json(&md.k, &md.matrix),
        normalization: md.normalization.name().into(),
        prec: Some(md.prec),
    }
}

pub fn parse_module_json(text: &str) -> Result<FilteredPhiModule> {
    let j: ModuleJson = serde_json::from_str(text).map_err(jerr)?;
    if j.p > MAX_P || j.a == 0 || j.a > MAX_A || j.m < 1 || j.m > MAX_M {
        return Err(perr("p, a or m out of range"));
    }
    let prec = j.prec.unwrap_or(20);
    if !(1..=MAX_PREC).contains(&prec) {
        return Err(perr("prec out of range"));
    }
    let norm = Normalization::parse(&j.normalization).map_err(|e| perr(e.to_string()))?;
    let k = Ctx::new(j.p, j.a as usize, j.m, prec).map_err(|e| perr(e.to_string()))?;
    let ht = j.ht_weights.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>()?;
    if ht.len() != j.matrix.len() {
        return Err(perr("ht_weights and matrix sizes differ"));
    }
    let matrix = mat_from_json(&k, &j.matrix)?;
    FilteredPhiModule::new(k, ht, matrix, norm, prec)
}

// ------------------------------------------------------------- polyhedra

/// {"vertices": [[...]], "facets": [{"normal": [...], "level": c}], "m": m, "nvol": v}
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedronJson {
    pub vertices: Vec<Vec<i64>>,
    pub facets: Vec<Facet>,
    pub m: i64,
    pub nvol: i64,
}

pub fn polyhedron_to_json(poly: &NewtonPolyhedron) -> PolyhedronJson {
    PolyhedronJson {
        vertices: poly.vertices.iter().map(|v| v[..poly.n].iter().map(|&x| x as i64).collect()).collect(),
        facets: poly.facets.clone(),
        m: poly.m,
        nvol: poly.nvol,
    }
}

/// Decodes and cross-checks: the polyhedron is rebuilt from the vertices and
/// must reproduce the stated facets, m and nvol.
pub fn parse_polyhedron_json(text: &str) -> Result<NewtonPolyhedron> {
    let j: PolyhedronJson = serde_json::from_str(text).map_err(jerr)?;
    let n = j.vertices.first().map(|v| v.len()).ok_or_else(|| perr("no vertices"))?;
    if n == 0 || n > MAX_N || j.vertices.iter().any(|v| v.len() != n) {
        return Err(perr("vertices must share a dimension in 1..=MAX_N"));
    }
    if j.vertices.len() > 64 || j.vertices.iter().flatten().any(|x| x.abs() > 1000) {
        return Err(perr("polyhedron too large"));
    }
    let mut pts: Vec<Exp> = Vec::new();
    let mut seen = BTreeSet::new();
    for v in &j.vertices {
        let e = exp_from(v).map_err(|e| perr(e.to_string()))?;
        if v.iter().any(|&x| x != 0) && seen.insert(e) {
            pts.push(e);
        }
    }
    if pts.is_empty() {
        return Err(perr("only the origin given"));
    }
    let poly = NewtonPolyhedron::build(&SupportSet::new(n, pts).map_err(|e| perr(e.to_string()))?);
    let key = |f: &Facet| (f.normal.clone(), f.level);
    let want: BTreeSet<_> = j.facets.iter().map(key).collect();
    let got: BTreeSet<_> = poly.facets.iter().map(key).collect();
    if want != got || poly.m != j.m || poly.nvol != j.nvol {
        return Err(Error::Verification("polyhedron data does not match its vertices".into()));
    }
    Ok(poly)
}

// ------------------------------------------------------------ polynomials

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exp: Vec<i64>,
}

/// {"n": n, "p": p, "a": a, "terms": [{"coeff": "...", "exp": [...]}]}
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub p: u32,
    pub a: u32,
    pub terms: Vec<TermJson>,
}

pub fn poly_to_json(f: &LaurentPoly) -> PolyJson {
    PolyJson {
        n: f.n,
        p: f.p(),
        a: f.a(),
        terms: f
            .terms
            .iter()
            .map(|(u, &c)| TermJson { coeff: coeff_to_string(&f.fq, c), exp: u[..f.n].iter().map(|&x| x as i64).collect() })
            .collect(),
    }
}

pub fn parse_poly_json(text: &str) -> Result<LaurentPoly> {
    let j: PolyJson = serde_json::from_str(text).map_err(jerr)?;
    if j.a == 0 || j.a as u64 > MAX_A || j.p as u64 > MAX_P {
        return Err(perr("p or a out of range"));
    }
    let fq = Arc::new(Field::new(j.p, j.a)?);
    let mut f = LaurentPoly::new(j.n, fq.clone())?;
    for t in &j.terms {
        if t.exp.len() != j.n {
            return Err(perr(format!("exponent {:?} does not have n = {} entries", t.exp, j.n)));
        }
        let u = exp_from(&t.exp).map_err(|e| perr(e.to_string()))?;
        let c = coeff_from_string(&fq, &t.coeff)?;
        f.add_term(u, c);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        assert_eq!(q_to_string(&Q::new(-1, 2)), "-1/2");
        assert_eq!(q_to_string(&Q::from_integer(3)), "3");
        assert_eq!(parse_q(" -2/4 ").unwrap(), Q::new(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn scalar_round_trip() {
        let k = Ctx::new(5, 2, 2, 10).unwrap();
        let x = k.add(&k.mul(&k.teichmuller(7), &k.pi_m_pow(3)), &k.from_int(25));
        let x = k.with_prec(&x, 30);
        let j = scalar_to_json(&k, &x);
        let text = serde_json::to_string(&j).unwrap();
        let y = parse_scalar_json(&k, &text).unwrap();
        assert!(k.eq_at(&x, &y));
        assert_eq!(k.prec_units(&y), 30);
        let z = parse_scalar_json(&k, r#"{"val":null,"terms":[],"prec":"inf"}"#).unwrap();
        assert!(k.is_zero(&z));
    }

    #[test]
    fn zq_poly_strings() {
        assert_eq!(parse_zq_poly("3 + 2*X", 2).unwrap(), vec![BigInt::from(3), BigInt::from(2)]);
        assert_eq!(parse_zq_poly("X", 2).unwrap(), vec![BigInt::from(0), BigInt::from(1)]);
        assert!(parse_zq_poly("X^2", 2).is_err());
        assert!(parse_zq_poly("-1", 1).is_err());
    }
}
