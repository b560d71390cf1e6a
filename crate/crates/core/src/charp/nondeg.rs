//! Nondegeneracy test on the faces of the Newton polyhedron that miss the
//! origin, by exhaustive search for common zeros of the x_i d/dx_i f_tau over
//! the tori of F_{q^s}, s <= s_bound.

use super::poly::LaurentPoly;
use crate::error::Result;
use crate::ff::Field;
use crate::geometry::{Exp, NewtonPolyhedron};
use num_integer::Integer;
use serde::Serialize;
use std::collections::BTreeSet;

/// Largest number of torus points examined per component and field.
pub const POINT_BUDGET: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentZero {
    /// 0-based variable indices of the component
    pub vars: Vec<usize>,
    /// the zero lies in F_{q^s}
    pub s: u32,
    /// packed F_{q^s} coordinates, one per variable
    pub point: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// every face-restricted system has been shown zero-free over F_{q^s}, s <= bound;
    /// faces whose components are single monomials are settled for all s
    NondegenerateUpTo(u32),
    /// a common zero exists over F_{q^s}; the point is given per variable-disjoint
    /// component, each over its own field (free variables may take any value)
    Degenerate { face: Vec<Exp>, s: u32, witness: Vec<ComponentZero> },
    /// the search budget ran out before s_bound was reached
    Inconclusive { reached: u32 },
}

impl Verdict {
    pub fn is_nondegenerate(&self) -> bool {
        matches!(self, Verdict::NondegenerateUpTo(_))
    }
}

/// Split the terms into classes whose variable sets are disjoint.
pub(crate) fn components(terms: &[(Exp, u32)], n: usize) -> Vec<Vec<(Exp, u32)>> {
    let k = terms.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for j in 0..n {
        let users: Vec<usize> = (0..k).filter(|&i| terms[i].0[j] != 0).collect();
        for w in users.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<(Exp, u32)>> = Default::default();
    for i in 0..k {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(terms[i]);
    }
    groups.into_values().collect()
}

enum Search {
    Found(Vec<u32>),
    None,
    OverBudget,
}

/// Look for a common zero of x_l d/dx_l g (l in vars) over the torus of `big`.
fn search(comp: &[(Exp, u32)], vars: &[usize], small: &Field, big: &Field, root: u32) -> Search {
    let q = big.q() - 1;
    let k = vars.len();
    if (q as f64).powi(k as i32) > POINT_BUDGET as f64 {
        return Search::OverBudget;
    }
    // derivative coefficients embedded into the big field
    let eqs: Vec<Vec<(Vec<i64>, u32)>> = vars
        .iter()
        .map(|&l| {
            comp.iter()
                .filter_map(|(u, c)| {
                    let d = small.scale(*c, u[l] as i64);
                    (d != 0).then(|| (vars.iter().map(|&j| u[j] as i64).collect(), big.embed(small, root, d)))
                })
                .collect()
        })
        .collect();
    let mut logs = vec![0u64; k];
    loop {
        let ok = eqs.iter().all(|eq| {
            let mut acc = 0u32;
            for (u, c) in eq {
                let e: i64 = u.iter().zip(logs.iter()).map(|(a, &b)| a * b as i64).sum();
                acc = big.add(acc, big.mul(*c, big.exp(e.rem_euclid(q as i64) as u64)));
            }
            acc == 0
        });
        if ok {
            return Search::Found(logs.iter().map(|&l| big.exp(l)).collect());
        }
        let mut j = 0;
        loop {
            if j == k {
                return Search::None;
            }
            logs[j] += 1;
            if logs[j] < q {
                break;
            }
            logs[j] = 0;
            j += 1;
        }
    }
}

pub fn is_nondegenerate(f: &LaurentPoly, poly: &NewtonPolyhedron, s_bound: u32) -> Result<Verdict> {
    let s_bound = s_bound.max(1);
    let p = f.p();
    let small = &*f.fq;
    let mut fields: Vec<Option<(Field, u32)>> = vec![None; s_bound as usize + 1];
    let mut reached = s_bound;
    for face in poly.faces_not_containing_origin() {
        let terms: Vec<(Exp, u32)> = face.support.iter().map(|u| (*u, f.terms[u])).collect();
        let comps = components(&terms, f.n);
        let mut witness = Vec::new();
        let mut all_found = true;
        for comp in comps.iter() {
            let vars: Vec<usize> = (0..f.n).filter(|&j| comp.iter().any(|(u, _)| u[j] != 0)).collect();
            if comp.len() == 1 {
                let u = comp[0].0;
                if vars.iter().all(|&j| u[j] as i64 % p as i64 == 0) {
                    witness.push(ComponentZero { vars: vars.clone(), s: 1, point: vec![1; vars.len()] });
                } else {
                    all_found = false;
                }
                continue;
            }
            let mut found = None;
            for s in 1..=s_bound {
                if fields[s as usize].is_none() {
                    let big = match Field::new(p, small.k * s) {
                        Ok(b) => b,
                        Err(_) => {
                            reached = reached.min(s - 1);
                            break;
                        }
                    };
                    let root = big.embedding_of(small)?;
                    fields[s as usize] = Some((big, root));
                }
                let (big, root) = fields[s as usize].as_ref().unwrap();
                match search(comp, &vars, small, big, *root) {
                    Search::Found(pt) => {
                        found = Some(ComponentZero { vars: vars.clone(), s, point: pt });
                        break;
                    }
                    Search::None => {}
                    Search::OverBudget => {
                        reached = reached.min(s - 1);
                        break;
                    }
                }
            }
            match found {
                Some(z) => witness.push(z),
                None => all_found = false,
            }
        }
        if all_found {
            let s = witness.iter().fold(1u32, |acc, z| acc.lcm(&z.s));
            return Ok(Verdict::Degenerate { face: face.support.clone(), s, witness });
        }
    }
    if reached < s_bound {
        return Ok(Verdict::Inconclusive { reached });
    }
    Ok(Verdict::NondegenerateUpTo(s_bound))
}

/// Variables that occur in f.
pub fn used_variables(f: &LaurentPoly) -> BTreeSet<usize> {
    (0..f.n).filter(|&j| f.terms.keys().any(|u| u[j] != 0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charp::parse::parse_poly;
    use std::sync::Arc;

    fn verdict(text: &str, p: u32, s: u32) -> Verdict {
        let f = parse_poly(text, None, Arc::new(Field::new(p, 1).unwrap())).unwrap();
        let poly = NewtonPolyhedron::build(&f.support().unwrap());
        is_nondegenerate(&f, &poly, s).unwrap()
    }

    #[test]
    fn curves() {
        assert_eq!(verdict("x^4", 5, 6), Verdict::NondegenerateUpTo(6));
        assert!(matches!(verdict("x^5", 5, 6), Verdict::Degenerate { s: 1, .. }));
        assert!(verdict("x^2+x", 3, 6).is_nondegenerate());
        assert!(verdict("x^2+x^-1", 5, 6).is_nondegenerate());
    }

    #[test]
    fn square_of_linear_form_is_degenerate() {
        match verdict("x1^2 + 2*x1*x2 + x2^2", 5, 3) {
            Verdict::Degenerate { s, witness, .. } => {
                assert_eq!(s, 1);
                let pt = &witness[0].point;
                assert_eq!((pt[0] + pt[1]) % 5, 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(verdict("x1^3+x2^3", 7, 4).is_nondegenerate());
        assert!(verdict("x1^2+x1*x2+x2^2", 7, 3).is_nondegenerate());
    }
}
