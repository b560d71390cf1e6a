//! Newton polyhedra of Laurent polynomials: facets, the weight gauge, faces,
//! weight slices and normalized volume.
//!
//! Dimensions up to `MAX_N` are supported; exponent vectors are fixed-size
//! arrays padded with zeros.

use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const MAX_N: usize = 4;

pub type Exp = [i32; MAX_N];
pub type Q = Ratio<i64>;

pub fn exp_from(v: &[i64]) -> Result<Exp> {
    if v.len() > MAX_N {
        return Err(Error::Unsupported(format!("dimension {} exceeds {MAX_N}", v.len())));
    }
    let mut e = [0i32; MAX_N];
    for (i, &x) in v.iter().enumerate() {
        e[i] = i32::try_from(x).map_err(|_| Error::Domain("exponent out of range".into()))?;
    }
    Ok(e)
}

pub fn exp_add(a: &Exp, b: &Exp) -> Exp {
    let mut c = *a;
    for i in 0..MAX_N {
        c[i] += b[i];
    }
    c
}

pub fn exp_scale(a: &Exp, k: i32) -> Exp {
    let mut c = *a;
    for x in c.iter_mut() {
        *x *= k;
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    pub n: usize,
    pub points: Vec<Exp>,
}

impl SupportSet {
    pub fn new(n: usize, points: Vec<Exp>) -> Result<SupportSet> {
        if n == 0 || n > MAX_N {
            return Err(Error::Unsupported(format!("dimension {n} not in 1..={MAX_N}")));
        }
        if points.is_empty() {
            return Err(Error::Domain("empty support".into()));
        }
        let set: BTreeSet<Exp> = points.iter().copied().collect();
        if set.len() != points.len() {
            return Err(Error::Domain("duplicate support points".into()));
        }
        Ok(SupportSet { n, points })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub level: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDescriptor {
    /// supp(f) points on the face
    pub support: Vec<Exp>,
    pub contains_origin: bool,
    pub dim: usize,
}

#[derive(Clone, Debug)]
struct Face {
    pts: BTreeSet<usize>,
    dim: usize,
}

#[derive(Clone, Debug)]
pub struct NewtonPolyhedron {
    pub n: usize,
    /// supp(f) together with the origin, deduplicated
    pub points: Vec<Exp>,
    origin: usize,
    pub support: Vec<Exp>,
    pub vertices: Vec<Exp>,
    /// facets not through the origin: <g,u> <= level on the polyhedron
    pub facets: Vec<Facet>,
    /// facets through the origin, as inward normals h with <h,u> >= 0 on the cone
    pub cone: Vec<Vec<i64>>,
    pub m: i64,
    pub dim: usize,
    pub nvol: i64,
    faces: Vec<Face>,
    /// m / level per facet
    facet_scale: Vec<i64>,
}

fn dot(a: &[i64], b: &Exp) -> i64 {
    a.iter().zip(b.iter()).map(|(x, &y)| x * y as i64).sum()
}

/// Determinant of a small integer matrix (Bareiss).
pub fn det_i64(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Rank of integer vectors via fraction-free elimination.
fn rank(vecs: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<i128>> = vecs.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let (a, b) = (rows[r][c], rows[i][c]);
                for j in 0..cols {
                    rows[i][j] = rows[i][j] * a - rows[r][j] * b;
                }
                let g = rows[i].iter().fold(0i128, |g, &x| g.gcd(&x));
                if g > 1 {
                    for x in rows[i].iter_mut() {
                        *x /= g;
                    }
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

fn affine_dim(points: &[Exp], idx: &BTreeSet<usize>, n: usize) -> usize {
    let v: Vec<usize> = idx.iter().copied().collect();
    if v.len() <= 1 {
        return 0;
    }
    let base = points[v[0]];
    let diffs: Vec<Vec<i64>> =
        v[1..].iter().map(|&i| (0..n).map(|j| (points[i][j] - base[j]) as i64).collect()).collect();
    rank(&diffs)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl NewtonPolyhedron {
    pub fn build(s: &SupportSet) -> NewtonPolyhedron {
        let n = s.n;
        let mut pts: BTreeSet<Exp> = s.points.iter().copied().collect();
        pts.insert([0; MAX_N]);
        let points: Vec<Exp> = pts.into_iter().collect();
        let origin = points.iter().position(|p| *p == [0; MAX_N]).unwrap();
        let all: BTreeSet<usize> = (0..points.len()).collect();
        let dim = affine_dim(&points, &all, n);
        let mut support = s.points.clone();
        support.sort();

        let mut facet_set: BTreeSet<(Vec<i64>, i64)> = BTreeSet::new();
        let mut facet_pts: Vec<BTreeSet<usize>> = Vec::new();
        if dim == n {
            for sub in subsets(points.len(), n) {
                let q0 = points[sub[0]];
                let rows: Vec<Vec<i64>> =
                    sub[1..].iter().map(|&i| (0..n).map(|j| (points[i][j] - q0[j]) as i64).collect()).collect();
                // normal by cofactors
                let mut g: Vec<i64> = (0..n)
                    .map(|col| {
                        let minor: Vec<Vec<i64>> = rows
                            .iter()
                            .map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, &x)| x).collect())
                            .collect();
                        let d = det_i64(&minor) as i64;
                        if col % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .collect();
                if g.iter().all(|&x| x == 0) {
                    continue;
                }
                let gg = g.iter().fold(0i64, |a, &b| a.gcd(&b));
                for x in g.iter_mut() {
                    *x /= gg;
                }
                let c = dot(&g, &q0);
                let vals: Vec<i64> = points.iter().map(|p| dot(&g, p) - c).collect();
                let (g, c) = if vals.iter().all(|&v| v <= 0) {
                    (g, c)
                } else if vals.iter().all(|&v| v >= 0) {
                    (g.iter().map(|x| -x).collect(), -c)
                } else {
                    continue;
                };
                if facet_set.insert((g.clone(), c)) {
                    let on: BTreeSet<usize> = (0..points.len()).filter(|&i| dot(&g, &points[i]) == c).collect();
                    facet_pts.push(on);
                }
            }
        }
        let mut facets = Vec::new();
        let mut cone = Vec::new();
        for (g, c) in facet_set.iter() {
            if *c > 0 {
                facets.push(Facet { normal: g.clone(), level: *c });
            } else {
                cone.push(g.iter().map(|x| -x).collect());
            }
        }
        let m = facets.iter().fold(1i64, |acc, f| acc.lcm(&f.level));
        let facet_scale = facets.iter().map(|f| m / f.level).collect();

        // face lattice by closure of facet point sets under intersection
        let mut face_sets: BTreeSet<BTreeSet<usize>> = facet_pts.iter().cloned().collect();
        loop {
            let cur: Vec<BTreeSet<usize>> = face_sets.iter().cloned().collect();
            let mut added = false;
            for i in 0..cur.len() {
                for j in i + 1..cur.len() {
                    let x: BTreeSet<usize> = cur[i].intersection(&cur[j]).copied().collect();
                    if !x.is_empty() && face_sets.insert(x) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        face_sets.insert(all.clone());
        let mut faces: Vec<Face> =
            face_sets.into_iter().map(|pts| Face { dim: affine_dim(&points, &pts, n), pts }).collect();
        faces.sort_by_key(|f| (f.dim, f.pts.iter().copied().collect::<Vec<_>>()));
        let vertex_idx: BTreeSet<usize> =
            faces.iter().filter(|f| f.dim == 0 && f.pts.len() == 1).map(|f| *f.pts.iter().next().unwrap()).collect();
        let vertices: Vec<Exp> = vertex_idx.iter().map(|&i| points[i]).collect();

        let mut poly = NewtonPolyhedron {
            n,
            points,
            origin,
            support,
            vertices,
            facets,
            cone,
            m,
            dim,
            nvol: 0,
            faces,
            facet_scale,
        };
        if dim == n {
            poly.nvol = poly.compute_nvol(&vertex_idx);
        }
        poly
    }

    fn compute_nvol(&self, vertex_idx: &BTreeSet<usize>) -> i64 {
        let mut total: i128 = 0;
        for f in self.faces.iter() {
            if f.dim + 1 != self.n || f.pts.contains(&self.origin) {
                continue;
            }
            for simplex in self.triangulate(f, vertex_idx) {
                let rows: Vec<Vec<i64>> =
                    simplex.iter().map(|&i| (0..self.n).map(|j| self.points[i][j] as i64).collect()).collect();
                total += det_i64(&rows).abs();
            }
        }
        total as i64
    }

    /// Pulling triangulation of a face into simplices given by point indices.
    fn triangulate(&self, face: &Face, vertex_idx: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let verts: BTreeSet<usize> = face.pts.intersection(vertex_idx).copied().collect();
        if face.dim == 0 {
            return vec![verts.into_iter().collect()];
        }
        let v0 = *verts.iter().min_by_key(|&&i| self.points[i]).unwrap();
        let mut out = Vec::new();
        for g in self.faces.iter() {
            if g.dim + 1 == face.dim && g.pts.is_subset(&face.pts) && !g.pts.contains(&v0) {
                for mut s in self.triangulate(g, vertex_idx) {
                    s.insert(0, v0);
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn in_cone(&self, u: &Exp) -> bool {
        self.cone.iter().all(|h| dot(h, u) >= 0)
    }

    /// m * w(u) for u in the cone.
    pub fn weight_units(&self, u: &Exp) -> i64 {
        self.facets
            .iter()
            .zip(self.facet_scale.iter())
            .map(|(f, s)| dot(&f.normal, u) * s)
            .max()
            .unwrap_or(0)
            .max(0)
    }

    pub fn weight(&self, u: &Exp) -> Result<Q> {
        if self.dim != self.n {
            return Err(Error::Unsupported("weight requires dim = n".into()));
        }
        if !self.in_cone(u) {
            return Err(Error::Domain(format!("{:?} lies outside cone(f)", &u[..self.n])));
        }
        Ok(Q::new(self.weight_units(u), self.m))
    }

    pub fn cofacial(&self, u: &Exp, v: &Exp) -> Result<bool> {
        let wu = self.weight(u)?;
        let wv = self.weight(v)?;
        Ok(self.weight(&exp_add(u, v))? == wu + wv)
    }

    /// All lattice points of the cone with m * w(u) = level.
    pub fn lattice_points_of_weight_units(&self, level: i64) -> Result<Vec<Exp>> {
        if self.dim != self.n {
            return Err(Error::Unsupported("weight slices need dim = n".into()));
        }
        if level < 0 {
            return Ok(Vec::new());
        }
        let n = self.n;
        let mut lo = [0i64; MAX_N];
        let mut hi = [0i64; MAX_N];
        for j in 0..n {
            let mn = self.vertices.iter().map(|v| v[j] as i64).min().unwrap().min(0);
            let mx = self.vertices.iter().map(|v| v[j] as i64).max().unwrap().max(0);
            lo[j] = Integer::div_floor(&(mn * level), &self.m);
            hi[j] = Integer::div_ceil(&(mx * level), &self.m);
        }
        let mut out = Vec::new();
        let mut cur = lo;
        loop {
            let mut u = [0i32; MAX_N];
            for j in 0..n {
                u[j] = cur[j] as i32;
            }
            if self.in_cone(&u) && self.weight_units(&u) == level {
                out.push(u);
            }
            // odometer
            let mut j = 0;
            loop {
                if j == n {
                    out.sort();
                    return Ok(out);
                }
                cur[j] += 1;
                if cur[j] <= hi[j] {
                    break;
                }
                cur[j] = lo[j];
                j += 1;
            }
        }
    }

    pub fn lattice_points_of_weight(&self, w: Q) -> Result<Vec<Exp>> {
        let units = w * Q::from_integer(self.m);
        if !units.is_integer() {
            return Err(Error::Domain("weight not in (1/m)Z".into()));
        }
        self.lattice_points_of_weight_units(units.to_integer())
    }

    pub fn faces(&self) -> Vec<FaceDescriptor> {
        self.faces
            .iter()
            .map(|f| FaceDescriptor {
                support: f.pts.iter().map(|&i| self.points[i]).filter(|p| self.support.contains(p)).collect(),
                contains_origin: f.pts.contains(&self.origin),
                dim: f.dim,
            })
            .collect()
    }

    pub fn faces_not_containing_origin(&self) -> Vec<FaceDescriptor> {
        self.faces().into_iter().filter(|f| !f.contains_origin).collect()
    }
}
