//! Convex polygons sampled at every integer abscissa.

use crate::error::{Error, Result};
use crate::padic::{Ctx, Scalar, Q};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// slopes are Hodge-Tate weights / ord of Frobenius eigenvalues (negative for NP modules)
    Internal,
    /// slopes w(u) in [0, n] / ord_q of the reciprocal roots of the L-function
    Classical,
}

/// y-values at x = 0, 1, ..., d, with y(0) = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    pub convention: Convention,
    pub ys: Vec<Q>,
    /// per unit segment [x, x+1]: a coefficient zero at precision might lie
    /// below the hull there
    pub inconclusive: Vec<bool>,
}

impl Polygon {
    /// Polygon with the given slopes, sorted ascending.
    pub fn from_slopes(convention: Convention, slopes: &[Q]) -> Polygon {
        let mut s = slopes.to_vec();
        s.sort();
        let mut ys = vec![Q::from_integer(0)];
        for x in &s {
            let last = *ys.last().unwrap();
            ys.push(last + x);
        }
        Polygon { convention, inconclusive: vec![false; s.len()], ys }
    }

    pub fn len(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slopes(&self) -> Vec<Q> {
        self.ys.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn end(&self) -> Q {
        *self.ys.last().unwrap()
    }

    /// All integer points (x, y).
    pub fn points(&self) -> Vec<(i64, Q)> {
        self.ys.iter().enumerate().map(|(x, y)| (x as i64, *y)).collect()
    }

    /// Break points only: endpoints and points where the slope changes.
    pub fn vertices(&self) -> Vec<(i64, Q)> {
        let s = self.slopes();
        let mut out = vec![(0, self.ys[0])];
        for x in 1..self.ys.len() {
            if x == self.ys.len() - 1 || s[x - 1] != s[x] {
                out.push((x as i64, self.ys[x]));
            }
        }
        out
    }

    pub fn is_convex(&self) -> bool {
        self.ys[0] == Q::from_integer(0) && self.slopes().windows(2).all(|w| w[0] <= w[1])
    }

    /// Polygon with slopes negated (and re-sorted), switching convention.
    pub fn negated(&self) -> Polygon {
        let s: Vec<Q> = self.slopes().iter().map(|x| -x).collect();
        let conv = match self.convention {
            Convention::Internal => Convention::Classical,
            Convention::Classical => Convention::Internal,
        };
        let mut out = Polygon::from_slopes(conv, &s);
        let mut inc = self.inconclusive.clone();
        inc.reverse();
        out.inconclusive = inc;
        out
    }

    /// Pointwise self >= other; lengths must agree.
    pub fn lies_on_or_above(&self, other: &Polygon) -> bool {
        self.ys.len() == other.ys.len() && self.ys.iter().zip(&other.ys).all(|(a, b)| a >= b)
    }

    pub fn max_slope_denominator(&self) -> i64 {
        self.slopes().iter().map(|s| *s.denom()).max().unwrap_or(1)
    }

    pub fn is_conclusive(&self) -> bool {
        !self.inconclusive.iter().any(|&b| b)
    }
}

/// Newton polygon of 1 + c_1 T + ... + c_d T^d: lower convex hull of
/// (k, ord c_k / a). Coefficients zero at precision are left out of the hull;
/// a segment is flagged when such a coefficient's precision bound lies
/// strictly below the hull there.
pub fn newton_polygon_of(k: &Ctx, coeffs: &[Scalar], a: usize, convention: Convention) -> Result<Polygon> {
    let d = coeffs.len().saturating_sub(1);
    let div = Q::from_integer(a as i64);
    let mut pts: Vec<(usize, Q)> = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if let Some(o) = k.ord(c) {
            pts.push((i, o / div));
        }
    }
    if pts.first().map(|p| p.0) != Some(0) || pts.last().map(|p| p.0) != Some(d) {
        return Err(Error::Precision("leading or constant coefficient is zero at precision".into()));
    }
    let (x0, y0) = pts[0];
    if y0 != Q::from_integer(0) && x0 == 0 {
        // normalize so the polygon starts at the origin
        for p in pts.iter_mut() {
            p.1 -= y0;
        }
    }
    // lower hull (monotone chain)
    let mut hull: Vec<(usize, Q)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop (x2,y2) if it lies on or above the segment (x1,y1)-(pt)
            let lhs = (y2 - y1) * Q::from_integer((pt.0 - x1) as i64);
            let rhs = (pt.1 - y1) * Q::from_integer((x2 - x1) as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut ys = vec![Q::from_integer(0); d + 1];
    for w in hull.windows(2) {
        let ((xa, ya), (xb, yb)) = (w[0], w[1]);
        let slope = (yb - ya) / Q::from_integer((xb - xa) as i64);
        for x in xa..=xb {
            ys[x] = ya + slope * Q::from_integer((x - xa) as i64);
        }
    }
    let mut inconclusive = vec![false; d];
    for (i, c) in coeffs.iter().enumerate() {
        if k.ord(c).is_none() {
            let bound = k.prec_ord(c) / div - y0;
            if bound < ys[i] {
                if i > 0 {
                    inconclusive[i - 1] = true;
                }
                if i < d {
                    inconclusive[i] = true;
                }
            }
        }
    }
    Ok(Polygon { convention, ys, inconclusive })
}
