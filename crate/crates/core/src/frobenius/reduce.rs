//! Reduction of a Laurent series to the monomial basis modulo the image of
//! the twisted derivations D_l = x_l d/dx_l + x_l dF/dx_l.
//!
//! Terms are processed from the highest weight level down. At a level W the
//! top-weight part a is split as a = y S with S the Hensel lift of the
//! char-p splitting (rows f_l x^{u'} for the selected generators, then unit
//! rows at the complement monomials). Each generator part is replaced by the
//! remaining terms of its relation, which either lie strictly below W or
//! carry extra valuation.

use super::Setup;
use crate::error::{Error, Result};
use crate::geometry::{exp_add, exp_scale, Exp, MAX_N};
use crate::padic::{Ctx, Scalar};
use serde::Serialize;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FKind {
    /// F = pi f
    Hat,
    /// F = sum_l gamma_l f^{sigma^l}(x^{p^l})
    Tilde,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReductionDiagnostics {
    pub levels_processed: usize,
    /// extra passes caused by the higher part of dF (tilde)
    pub passes: usize,
    pub max_level_units: i64,
    pub dropped_terms: usize,
    /// smallest potential of a dropped term, in units of 1/(m(p-1))
    pub min_dropped_units: Option<i64>,
    pub threshold_units: i64,
}

struct LevelLift {
    index: HashMap<Exp, usize>,
    gens: Vec<(usize, Exp)>,
    /// (row offset in S, basis index) for the complement monomials
    basis: Vec<(usize, usize)>,
    /// rows of S^{-1}, one per monomial, sparse
    sinv: Vec<Vec<(usize, Scalar)>>,
}

pub struct Reducer<'a> {
    pub setup: &'a Setup,
    pub kind: FKind,
    k: &'a Ctx,
    /// -1/kappa, kappa = pi or gamma
    neg_kappa_inv: Scalar,
    /// x_l d/dx_l fhat: (u, u_l alpha_u)
    dlog: Vec<Vec<(Exp, Scalar)>>,
    /// tilde only: the higher part of x_l dF/dx_l divided by gamma
    higher: Vec<Vec<(Exp, Scalar)>>,
    basis_index: HashMap<Exp, usize>,
    cache: RefCell<HashMap<i64, Rc<LevelLift>>>,
}

impl<'a> Reducer<'a> {
    /// `gain_units` bounds the potential gain of the discarded tail of the
    /// higher part of dF (tilde), in units of 1/(m(p-1)).
    pub fn new(setup: &'a Setup, kind: FKind, gain_units: i64) -> Result<Reducer<'a>> {
        let k = &*setup.k1;
        let n = setup.n();
        let mut dlog = vec![Vec::new(); n];
        for (u, a) in setup.fhat.iter() {
            for (l, d) in dlog.iter_mut().enumerate() {
                if u[l] != 0 {
                    d.push((*u, k.mul_int(a, u[l] as i64)));
                }
            }
        }
        let kappa = match kind {
            FKind::Hat => setup.dc.pi.clone(),
            FKind::Tilde => setup.dc.gamma.clone(),
        };
        let neg_kappa_inv = k.neg(&k.inv(&kappa)?);
        let mut higher = vec![Vec::new(); n];
        if kind == FKind::Tilde {
            let p = k.p as i64;
            let e = setup.poly.m * (p - 1);
            let ginv = k.inv(&setup.dc.gamma)?;
            let mut pk = 1i64;
            for j in 1..=setup.dc.l_max {
                pk *= p;
                // gain of the j-th term is at least (p^j - 1) in ord units
                if (pk - 1) * e >= gain_units {
                    break;
                }
                let c = k.mul(&setup.dc.gamma_l[j], &ginv);
                let c = k.mul_int(&c, pk);
                for (u, a) in setup.fhat.iter() {
                    let apow = k.sigma_pow(a, j as i64);
                    let v = exp_scale(u, pk as i32);
                    for (l, h) in higher.iter_mut().enumerate() {
                        if u[l] != 0 {
                            h.push((v, k.mul_int(&k.mul(&c, &apow), u[l] as i64)));
                        }
                    }
                }
            }
        }
        let basis_index = setup.basis.exps.iter().enumerate().map(|(i, u)| (*u, i)).collect();
        Ok(Reducer {
            setup,
            kind,
            k,
            neg_kappa_inv,
            dlog,
            higher,
            basis_index,
            cache: RefCell::new(HashMap::new()),
        })
    }

    fn lift(&self, units: i64) -> Result<Rc<LevelLift>> {
        if let Some(l) = self.cache.borrow().get(&units) {
            return Ok(l.clone());
        }
        let lift = Rc::new(self.build_lift(units)?);
        self.cache.borrow_mut().insert(units, lift.clone());
        Ok(lift)
    }

    fn build_lift(&self, units: i64) -> Result<LevelLift> {
        let k = self.k;
        let lv = self.setup.model.level(units)?;
        let ncols = lv.monos.len();
        let index: HashMap<Exp, usize> = lv.index.iter().map(|(u, i)| (*u, *i)).collect();
        let gens: Vec<(usize, Exp)> = lv.selected.iter().map(|&g| lv.gens[g]).collect();
        let mut basis = Vec::new();
        for (t, &c) in lv.basis_cols.iter().enumerate() {
            let u = lv.monos[c];
            let Some(&b) = self.basis_index.get(&u) else {
                return Err(Error::Degenerate(format!(
                    "level {units}/{}: complement monomial {:?} outside the basis",
                    self.setup.poly.m,
                    &u[..self.setup.n()]
                )));
            };
            basis.push((gens.len() + t, b));
        }
        // rows of S
        let mut rows: Vec<BTreeMap<usize, Scalar>> = Vec::with_capacity(ncols);
        for (l, up) in gens.iter() {
            let mut r: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (u, c) in self.dlog[*l].iter() {
                let s = exp_add(u, up);
                if self.setup.poly.weight_units(&s) == units {
                    let j = index[&s];
                    let v = match r.remove(&j) {
                        Some(x) => k.add(&x, c),
                        None => c.clone(),
                    };
                    if !k.is_zero(&v) {
                        r.insert(j, v);
                    }
                }
            }
            rows.push(r);
        }
        for &c in lv.basis_cols.iter() {
            rows.push(BTreeMap::from([(c, k.one())]));
        }
        if rows.len() != ncols {
            return Err(Error::Degenerate(format!("level {units}: splitting is not square")));
        }
        let sinv = sparse_inverse(k, rows, ncols)?;
        Ok(LevelLift { index, gens, basis, sinv })
    }

    /// Reduce `series` (terms over K_1), discarding terms whose potential
    /// m(p-1)(ord - w/(p-1)) reaches `thresh_units`. Returns coefficients on
    /// the raw monomials x^{u_j}.
    pub fn reduce(
        &self,
        series: impl IntoIterator<Item = (Exp, Scalar)>,
        thresh_units: i64,
    ) -> Result<(Vec<Scalar>, ReductionDiagnostics)> {
        let k = self.k;
        let poly = &*self.setup.poly;
        let mut diag = ReductionDiagnostics { threshold_units: thresh_units, ..Default::default() };
        let mut levels: BTreeMap<i64, HashMap<Exp, Scalar>> = BTreeMap::new();
        // terms from the higher part of dF rise in weight; they are collected
        // and reduced in a later pass, each pass gaining at least p-1 in ord
        let mut deferred: BTreeMap<i64, HashMap<Exp, Scalar>> = BTreeMap::new();
        let push = |levels: &mut BTreeMap<i64, HashMap<Exp, Scalar>>,
                        diag: &mut ReductionDiagnostics,
                        u: Exp,
                        c: Scalar| {
            let Some(v) = k.val_units(&c) else { return };
            let w = poly.weight_units(&u);
            let mu = poly.m * v - w;
            if mu >= thresh_units {
                diag.dropped_terms += 1;
                diag.min_dropped_units = Some(diag.min_dropped_units.map_or(mu, |x| x.min(mu)));
                return;
            }
            let lvl = levels.entry(w).or_default();
            match lvl.get_mut(&u) {
                Some(x) => *x = k.add(x, &c),
                None => {
                    lvl.insert(u, c);
                }
            }
        };
        for (u, c) in series {
            if !poly.in_cone(&u) {
                return Err(Error::Domain(format!("term {:?} outside the cone of the polyhedron", &u[..poly.n])));
            }
            push(&mut levels, &mut diag, u, c);
        }
        let d = self.setup.basis.len();
        let mut out = vec![k.zero(); d];
        loop {
            let Some((w, terms)) = levels.pop_last() else {
                if deferred.is_empty() {
                    break;
                }
                diag.passes += 1;
                std::mem::swap(&mut levels, &mut deferred);
                continue;
            };
            diag.levels_processed += 1;
            diag.max_level_units = diag.max_level_units.max(w);
            let lift = self.lift(w)?;
            let mut y: Vec<Option<Scalar>> = vec![None; lift.sinv.len()];
            for (u, a) in terms.iter() {
                if k.is_zero(a) {
                    continue;
                }
                let j = lift.index[u];
                for (t, s) in lift.sinv[j].iter() {
                    let v = k.mul(a, s);
                    y[*t] = Some(match y[*t].take() {
                        Some(x) => k.add(&x, &v),
                        None => v,
                    });
                }
            }
            for (g, (l, up)) in lift.gens.iter().enumerate() {
                let Some(yg) = &y[g] else { continue };
                if k.is_zero(yg) {
                    continue;
                }
                if up[*l] != 0 {
                    let c = k.mul_int(&k.mul(&self.neg_kappa_inv, yg), up[*l] as i64);
                    push(&mut levels, &mut diag, *up, c);
                }
                for (u, c) in self.dlog[*l].iter() {
                    let s = exp_add(u, up);
                    if poly.weight_units(&s) < w {
                        push(&mut levels, &mut diag, s, k.neg(&k.mul(c, yg)));
                    }
                }
                for (v, c) in self.higher[*l].iter() {
                    push(&mut deferred, &mut diag, exp_add(v, up), k.neg(&k.mul(c, yg)));
                }
            }
            for &(row, b) in lift.basis.iter() {
                if let Some(c) = &y[row] {
                    out[b] = k.add(&out[b], c);
                }
            }
        }
        Ok((out, diag))
    }
}

/// Rows of S^{-1} for a square sparse S whose reduction mod pi is invertible.
fn sparse_inverse(k: &Ctx, mut rows: Vec<BTreeMap<usize, Scalar>>, n: usize) -> Result<Vec<Vec<(usize, Scalar)>>> {
    let mut inv: Vec<BTreeMap<usize, Scalar>> = (0..n).map(|i| BTreeMap::from([(i, k.one())])).collect();
    let mut pivot_of_col = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for c in 0..n {
        let r = (0..n)
            .filter(|&r| !used[r] && rows[r].get(&c).is_some_and(|x| k.val_units(x) == Some(0)))
            .min_by_key(|&r| rows[r].len())
            .ok_or_else(|| Error::Precision(format!("no unit pivot in column {c} of a level splitting")))?;
        used[r] = true;
        pivot_of_col[c] = r;
        let pinv = k.inv(&rows[r][&c])?;
        let scale = |m: &mut BTreeMap<usize, Scalar>| {
            for v in m.values_mut() {
                *v = k.mul(v, &pinv);
            }
        };
        scale(&mut rows[r]);
        scale(&mut inv[r]);
        let prow: Vec<(usize, Scalar)> = rows[r].iter().map(|(a, b)| (*a, b.clone())).collect();
        let pinvrow: Vec<(usize, Scalar)> = inv[r].iter().map(|(a, b)| (*a, b.clone())).collect();
        for r2 in 0..n {
            if r2 == r {
                continue;
            }
            let Some(f) = rows[r2].get(&c).cloned() else { continue };
            for (j, v) in prow.iter() {
                axpy(k, &mut rows[r2], *j, &f, v);
            }
            rows[r2].remove(&c);
            for (j, v) in pinvrow.iter() {
                axpy(k, &mut inv[r2], *j, &f, v);
            }
        }
    }
    // S X = I with X rows permuted: the row pivoted at column c is row c of S^{-1}
    // in the column convention; we need y = a S^{-1}, i.e. (S^{-1})[c][t] =
    // X[pivot(c)] read as a map t -> value, where X = inv.
    let mut out = vec![Vec::new(); n];
    for c in 0..n {
        let r = pivot_of_col[c];
        out[c] = inv[r].iter().filter(|(_, v)| !k.is_zero(v)).map(|(t, v)| (*t, v.clone())).collect();
    }
    Ok(out)
}

fn axpy(k: &Ctx, row: &mut BTreeMap<usize, Scalar>, j: usize, f: &Scalar, v: &Scalar) {
    let t = k.mul(f, v);
    match row.get_mut(&j) {
        Some(x) => *x = k.sub(x, &t),
        None => {
            row.insert(j, k.neg(&t));
        }
    }
}

/// Convenience: the zero exponent.
pub fn origin() -> Exp {
    [0; MAX_N]
}
