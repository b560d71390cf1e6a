//! The graded ring R = (+)_i R^(i) with cofacial multiplication, the images
//! of the logarithmic derivatives of f in weight 1, and the graded complement
//! that yields the monomial basis M_NP.

use super::poly::LaurentPoly;
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::geometry::{exp_add, Exp, NewtonPolyhedron, Q};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Row reduction data of the ideal image at one weight level.
#[derive(Clone, Debug)]
pub struct Level {
    /// level in units of 1/m
    pub units: i64,
    /// R^(i), sorted by (total degree, lex)
    pub monos: Vec<Exp>,
    pub index: BTreeMap<Exp, usize>,
    /// generators (l, u'): fbar_l * x^{u'} with u' in R^(i-1)
    pub gens: Vec<(usize, Exp)>,
    /// indices into `gens` of a maximal independent subset, taken greedily in order
    pub selected: Vec<usize>,
    /// reduced row echelon form of the image, leftmost pivots
    pub rref: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
    /// complement: non-pivot columns
    pub basis_cols: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct GradedModel {
    pub poly: Arc<NewtonPolyhedron>,
    pub fq: Arc<Field>,
    /// weight-1 part of x_l d/dx_l f for each l
    pub fbar: Vec<Vec<(Exp, u32)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyBasis {
    /// exponents sorted by descending weight (ties: descending monomial order)
    pub exps: Vec<Exp>,
    /// weights in units of 1/m
    pub weight_units: Vec<i64>,
    pub m: i64,
    /// (level units, exponents) for every level with a nonempty complement
    pub per_level: Vec<(i64, Vec<Exp>)>,
}

impl CohomologyBasis {
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn weight(&self, i: usize) -> Q {
        Q::new(self.weight_units[i], self.m)
    }

    pub fn weights(&self) -> Vec<Q> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn ht_length(&self) -> Q {
        let mx = self.weight_units.iter().max().copied().unwrap_or(0);
        let mn = self.weight_units.iter().min().copied().unwrap_or(0);
        Q::new(mx - mn, self.m)
    }
}

pub fn mono_key(u: &Exp) -> (i64, Exp) {
    (u.iter().map(|&x| x as i64).sum(), *u)
}

impl GradedModel {
    pub fn new(f: &LaurentPoly, poly: Arc<NewtonPolyhedron>) -> Result<GradedModel> {
        if poly.dim != poly.n {
            return Err(Error::Domain("dim of the Newton polyhedron is below n".into()));
        }
        let m = poly.m;
        let fbar = (0..f.n)
            .map(|l| f.log_derivative(l).into_iter().filter(|(u, _)| poly.weight_units(u) == m).collect())
            .collect();
        Ok(GradedModel { poly, fq: f.fq.clone(), fbar })
    }

    /// Cofacial product x^u * x^v: Some(u+v) if the weights add.
    pub fn cofacial_product(&self, u: &Exp, v: &Exp) -> Option<Exp> {
        let s = exp_add(u, v);
        (self.poly.weight_units(&s) == self.poly.weight_units(u) + self.poly.weight_units(v)).then_some(s)
    }

    /// Row reduction of the image of (fbar_1..fbar_n) in R^(i), i = units/m.
    pub fn level(&self, units: i64) -> Result<Level> {
        let fq = &*self.fq;
        let mut monos = self.poly.lattice_points_of_weight_units(units)?;
        monos.sort_by_key(mono_key);
        let index: BTreeMap<Exp, usize> = monos.iter().enumerate().map(|(i, u)| (*u, i)).collect();
        let lower = if units >= self.poly.m {
            let mut v = self.poly.lattice_points_of_weight_units(units - self.poly.m)?;
            v.sort_by_key(mono_key);
            v
        } else {
            Vec::new()
        };
        let ncols = monos.len();
        let mut gens = Vec::new();
        let mut rows = Vec::new();
        for l in 0..self.fbar.len() {
            for v in lower.iter() {
                let mut row = vec![0u32; ncols];
                for (u, c) in self.fbar[l].iter() {
                    if let Some(s) = self.cofacial_product(u, v) {
                        let j = index[&s];
                        row[j] = fq.add(row[j], *c);
                    }
                }
                gens.push((l, *v));
                rows.push(row);
            }
        }
        // greedy selection by incremental elimination
        let mut echelon: Vec<(usize, Vec<u32>)> = Vec::new();
        let mut selected = Vec::new();
        for (gi, row) in rows.iter().enumerate() {
            let mut r = row.clone();
            for (pc, er) in echelon.iter() {
                let c = r[*pc];
                if c != 0 {
                    for j in 0..ncols {
                        r[j] = fq.sub(r[j], fq.mul(c, er[j]));
                    }
                }
            }
            if let Some(pc) = r.iter().position(|&x| x != 0) {
                let inv = fq.inv(r[pc]);
                for x in r.iter_mut() {
                    *x = fq.mul(*x, inv);
                }
                for (_, er) in echelon.iter_mut() {
                    let c = er[pc];
                    if c != 0 {
                        for j in 0..ncols {
                            er[j] = fq.sub(er[j], fq.mul(c, r[j]));
                        }
                    }
                }
                echelon.push((pc, r));
                selected.push(gi);
            }
        }
        echelon.sort_by_key(|(pc, _)| *pc);
        let pivots: Vec<usize> = echelon.iter().map(|(pc, _)| *pc).collect();
        let rref: Vec<Vec<u32>> = echelon.into_iter().map(|(_, r)| r).collect();
        let basis_cols = (0..ncols).filter(|j| !pivots.contains(j)).collect();
        Ok(Level { units, monos, index, gens, selected, rref, pivots, basis_cols })
    }

    /// M_NP by graded complements, levels 0, 1/m, ..., n.
    pub fn compute_basis(&self) -> Result<CohomologyBasis> {
        let poly = &self.poly;
        let target = poly.nvol as usize;
        let mut all: Vec<(i64, Exp)> = Vec::new();
        let mut per_level = Vec::new();
        for units in 0..=(poly.n as i64 * poly.m) {
            let lv = self.level(units)?;
            let comp: Vec<Exp> = lv.basis_cols.iter().map(|&j| lv.monos[j]).collect();
            if !comp.is_empty() {
                all.extend(comp.iter().map(|u| (units, *u)));
                per_level.push((units, comp));
            }
            if all.len() > target {
                return Err(Error::Degenerate(format!(
                    "graded complement exceeds n!vol = {target} at weight {}",
                    Q::new(units, poly.m)
                )));
            }
        }
        if all.len() != target {
            return Err(Error::Degenerate(format!(
                "graded complement has {} elements, n!vol = {target}",
                all.len()
            )));
        }
        all.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| mono_key(&b.1).cmp(&mono_key(&a.1))));
        Ok(CohomologyBasis {
            exps: all.iter().map(|x| x.1).collect(),
            weight_units: all.iter().map(|x| x.0).collect(),
            m: poly.m,
            per_level,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charp::parse::parse_poly;

    fn basis(text: &str, p: u32) -> CohomologyBasis {
        let f = parse_poly(text, None, Arc::new(Field::new(p, 1).unwrap())).unwrap();
        let poly = Arc::new(NewtonPolyhedron::build(&f.support().unwrap()));
        GradedModel::new(&f, poly).unwrap().compute_basis().unwrap()
    }

    fn ones(b: &CohomologyBasis) -> Vec<i32> {
        b.exps.iter().map(|u| u[0]).collect()
    }

    #[test]
    fn univariate_bases() {
        let b = basis("x^2+x", 3);
        assert_eq!(ones(&b), vec![1, 0]);
        assert_eq!(b.weights(), vec![Q::new(1, 2), Q::from_integer(0)]);
        let b = basis("x^3+x", 5);
        assert_eq!(ones(&b), vec![2, 1, 0]);
        assert_eq!(b.ht_length(), Q::new(2, 3));
        let b = basis("x^2+x^-1", 5);
        assert_eq!(ones(&b), vec![2, 1, 0]);
        assert_eq!(b.ht_length(), Q::from_integer(1));
    }

    #[test]
    fn first_level_image_is_full() {
        let f = parse_poly("x^2+x", None, Arc::new(Field::new(3, 1).unwrap())).unwrap();
        let poly = Arc::new(NewtonPolyhedron::build(&f.support().unwrap()));
        let g = GradedModel::new(&f, poly).unwrap();
        assert_eq!(g.fbar[0], vec![(f.terms.keys().last().copied().unwrap(), 2)]);
        let lv = g.level(2).unwrap();
        assert!(lv.basis_cols.is_empty());
        assert_eq!(g.level(0).unwrap().basis_cols, vec![0]);
    }

    #[test]
    fn separable_sum_is_a_product() {
        let b = basis("x1^2+x2^2", 5);
        assert_eq!(b.len(), 4);
        let set: std::collections::BTreeSet<(i32, i32)> = b.exps.iter().map(|u| (u[0], u[1])).collect();
        let expect: std::collections::BTreeSet<(i32, i32)> =
            [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().collect();
        assert_eq!(set, expect);
        let b = basis("x1^3+x2^3", 7);
        assert_eq!(b.len(), 9);
        assert_eq!(b.ht_length(), Q::new(4, 3));
    }
}
