//! Quasi-NP bases: filtration-generating bases whose leading coefficients
//! form a unipotent pattern. Coordinates are taken on the NP-normalized
//! basis pi^{p w(u)} x^u.

use super::{filtration_basis, is_filtration_generating, FilteredPhiModule};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::padic::{Ctx, Scalar, Q};

/// Index of mu(v): among the coordinates of minimal ord, the one of largest
/// weight (smallest index in NP order).
pub fn leading_power(k: &Ctx, v: &[Scalar]) -> Option<usize> {
    let best = v.iter().filter_map(|x| k.val_units(x)).min()?;
    v.iter().position(|x| k.val_units(x) == Some(best))
}

fn normalize(k: &Ctx, v: &[Scalar]) -> Result<Vec<Scalar>> {
    let mu = leading_power(k, v).ok_or_else(|| Error::Precision("vector vanished at precision during elimination".into()))?;
    let inv = k
        .inv(&v[mu])
        .map_err(|_| Error::Precision(format!("pivot at coordinate {mu} is zero at precision")))?;
    Ok(v.iter().map(|x| k.mul(x, &inv)).collect())
}

fn axpy(k: &Ctx, v: &mut [Scalar], c: &Scalar, w: &[Scalar]) {
    for (a, b) in v.iter_mut().zip(w) {
        *a = k.sub(a, &k.mul(c, b));
    }
}

/// Quasi-NP basis of span(vecs), built by induction on the dimension: a
/// quasi-NP basis of a hyperplane containing the lower filtration steps is
/// extended by one vector cleared against each weight group in turn.
pub fn quasi_np_basis(module: &FilteredPhiModule, vecs: &Mat) -> Result<Mat> {
    let md = module.to_np();
    let (e, ws) = filtration_basis(&md, vecs)?;
    build(&md.k, &e, &ws)
}

fn build(k: &Ctx, e: &[Vec<Scalar>], ws: &[Q]) -> Result<Mat> {
    let r = e.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    if r == 1 {
        return Ok(vec![normalize(k, &e[0])?]);
    }
    let mut basis = build(k, &e[..r - 1], &ws[..r - 1])?;
    let mus: Vec<usize> = basis
        .iter()
        .map(|w| leading_power(k, w).ok_or_else(|| Error::Precision("basis vector vanished at precision".into())))
        .collect::<Result<_>>()?;
    let mut v = e[r - 1].clone();
    let mut start = 0;
    while start < r - 1 {
        let mut end = start;
        while end < r - 1 && ws[end] == ws[start] {
            end += 1;
        }
        let coeffs: Vec<Scalar> = (start..end).map(|i| v[mus[i]].clone()).collect();
        for (c, i) in coeffs.iter().zip(start..end) {
            axpy(k, &mut v, c, &basis[i]);
        }
        start = end;
    }
    let vr = normalize(k, &v)?;
    let mu_r = leading_power(k, &vr).unwrap();
    let top = ws[r - 1];
    for i in 0..r - 1 {
        if ws[i] == top {
            let c = basis[i][mu_r].clone();
            axpy(k, &mut basis[i], &c, &vr);
        }
    }
    basis.push(vr);
    Ok(basis)
}

/// Postconditions of a quasi-NP basis: filtration-generating, and
/// A_{mu(v_i)}(v_j) is 1 for i = j and 0 for i != j with w(v_i) <= w(v_j).
pub fn is_quasi_np(module: &FilteredPhiModule, basis: &Mat) -> Result<bool> {
    let md = module.to_np();
    if !is_filtration_generating(&md, basis)? {
        return Ok(false);
    }
    let k = &*md.k;
    let ws: Vec<Q> = basis.iter().map(|v| md.vector_weight(v).unwrap()).collect();
    for (i, vi) in basis.iter().enumerate() {
        let Some(mu) = leading_power(k, vi) else { return Ok(false) };
        if !k.eq_at(&vi[mu], &k.one()) {
            return Ok(false);
        }
        for (j, vj) in basis.iter().enumerate() {
            if i != j && ws[i] <= ws[j] && !k.is_zero(&vj[mu]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
