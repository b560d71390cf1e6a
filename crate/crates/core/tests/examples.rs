//! Worked examples with known answers, one test per component.

use npmod::charp::{is_nondegenerate, parse_poly, LaurentPoly, Verdict};
use npmod::ff::Field;
use npmod::frobenius::matrices::comparison_series;
use npmod::frobenius::oracle::char_sum_oracle;
use npmod::frobenius::{frobenius_matrix, transform_matrix, FKind, MatrixKind, Reducer, Setup};
use npmod::geometry::{Exp, NewtonPolyhedron, Q, MAX_N};
use npmod::linalg;
use npmod::padic::dwork::DworkConstants;
use npmod::padic::{Ctx, Scalar};
use npmod::phimod::{check_np_dominating, Convention, FilteredPhiModule};
use std::sync::Arc;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn poly(text: &str, p: u32) -> LaurentPoly {
    parse_poly(text, None, Arc::new(Field::new(p, 1).unwrap())).unwrap()
}

fn e1(x: i32) -> Exp {
    let mut u = [0; MAX_N];
    u[0] = x;
    u
}

fn e2(x: i32, y: i32) -> Exp {
    [x, y, 0, 0]
}

fn polyhedron(f: &LaurentPoly) -> NewtonPolyhedron {
    NewtonPolyhedron::build(&f.support().unwrap())
}

#[test]
fn contexts_and_uniformizers() {
    let k = Ctx::new(3, 1, 2, 20).unwrap();
    let pi2 = k.pi_m_pow(1);
    assert!(k.eq_at(&k.pow(&pi2, 4), &k.from_int(-3)));
    assert_eq!(k.ord(&pi2), Some(q(1, 4)));
    let k1 = Ctx::new(3, 1, 1, 20).unwrap();
    let pp = k1.mul(&k1.pi(), &k1.pi());
    assert!(k1.eq_at(&pp, &k1.from_int(-3)));
    assert_eq!(k1.ord(&pp), Some(q(1, 1)));
    let k5 = Ctx::new(5, 1, 1, 20).unwrap();
    assert!(k5.eq_at(&k5.pow(&k5.pi(), 4), &k5.from_int(-5)));
    // q = 9: sigma moves the Teichmuller lift of a generator
    let k9 = Ctx::new(3, 2, 1, 10).unwrap();
    let g = (1..9).map(|c| k9.teichmuller(c)).find(|t| !k9.eq_at(&k9.sigma(t), t));
    assert!(g.is_some());
    assert!(k1.eq_at(&k1.teichmuller(2), &k1.from_int(-1)));
}

#[test]
fn gamma_has_the_valuation_of_pi() {
    for p in [3u64, 5, 7] {
        let k = Ctx::new(p, 1, 1, 20).unwrap();
        let dc = DworkConstants::new(&k, 2).unwrap();
        assert_eq!(k.ord(&dc.gamma), Some(q(1, p as i64 - 1)));
    }
}

#[test]
fn polyhedra_weights_and_faces() {
    let pl = polyhedron(&poly("x^2+x", 3));
    assert_eq!((pl.m, pl.nvol), (2, 2));
    assert_eq!(pl.weight(&e1(1)).unwrap(), q(1, 2));
    assert_eq!(pl.weight(&e1(0)).unwrap(), q(0, 1));
    assert_eq!(pl.lattice_points_of_weight(q(1, 2)).unwrap(), vec![e1(1)]);
    assert_eq!(pl.lattice_points_of_weight(q(0, 1)).unwrap(), vec![e1(0)]);
    let faces = pl.faces_not_containing_origin();
    assert_eq!(faces.len(), 1);
    assert_eq!(faces[0].support, vec![e1(2)]);

    let lau = polyhedron(&poly("x^2+x^-1", 5));
    assert_eq!(lau.weight(&e1(-1)).unwrap(), q(1, 1));
    assert_eq!(lau.weight(&e1(2)).unwrap(), q(1, 1));
    assert_eq!(lau.weight(&e1(-3)).unwrap(), q(3, 1));
    assert_eq!(lau.weight(&e1(3)).unwrap(), q(3, 2));
    assert!(lau.cofacial(&e1(1), &e1(2)).unwrap());
    assert!(!lau.cofacial(&e1(1), &e1(-1)).unwrap());
    assert_eq!(lau.faces_not_containing_origin().len(), 2);

    let tri = polyhedron(&poly("x1^2+x2^2", 5));
    assert_eq!(tri.nvol, 4);
    assert_eq!(tri.weight(&e2(1, 1)).unwrap(), q(1, 1));
    assert!(tri.cofacial(&e2(1, 0), &e2(0, 1)).unwrap());
    let mut lvl = tri.lattice_points_of_weight(q(1, 1)).unwrap();
    lvl.sort();
    assert_eq!(lvl, vec![e2(0, 2), e2(1, 1), e2(2, 0)]);
    assert_eq!(tri.faces_not_containing_origin().len(), 3);

    let cube = polyhedron(&poly("x1^3+x2^3", 7));
    assert_eq!(cube.nvol, 9);
}

#[test]
fn nondegeneracy_examples() {
    for (text, p) in [("x^3", 5), ("x^4", 3), ("x^2+x", 3)] {
        let f = poly(text, p);
        let v = is_nondegenerate(&f, &polyhedron(&f), 3).unwrap();
        assert!(v.is_nondegenerate(), "{text} @{p}: {v:?}");
    }
    let f = poly("x^3", 3);
    assert!(matches!(is_nondegenerate(&f, &polyhedron(&f), 3).unwrap(), Verdict::Degenerate { .. }));
}

#[test]
fn monomial_bases_and_ht_lengths() {
    let s = Setup::new(&poly("x^2+x", 3), 10).unwrap();
    assert_eq!(s.basis.exps, vec![e1(1), e1(0)]);
    assert_eq!(s.weights(), vec![q(1, 2), q(0, 1)]);
    for d in [2i32, 3, 4] {
        let s = Setup::new(&poly(&format!("x^{d}+x"), 7), 10).unwrap();
        let mut e: Vec<i32> = s.basis.exps.iter().map(|u| u[0]).collect();
        e.sort();
        assert_eq!(e, (0..d).collect::<Vec<_>>());
        assert_eq!(s.basis.ht_length(), q(d as i64 - 1, d as i64));
    }
    let s = Setup::new(&poly("x^3+x^-2", 7), 10).unwrap();
    let mut e: Vec<i32> = s.basis.exps.iter().map(|u| u[0]).collect();
    e.sort();
    assert_eq!(e, vec![-1, 0, 1, 2, 3]);
    assert_eq!(s.basis.ht_length(), q(1, 1));
    // n-fold sums of d-th powers
    let s = Setup::new(&poly("x1^3+x2^3", 7), 10).unwrap();
    assert_eq!(s.basis.ht_length(), q(4, 3));
    let s = Setup::new(&poly("x1^2+x2^2+x3^2", 5), 8).unwrap();
    assert_eq!((s.basis.len(), s.basis.ht_length()), (8, q(3, 2)));
}

#[test]
fn comparison_series_leading_coefficient() {
    for p in [3u32, 5] {
        let s = Setup::new(&poly("x^2+x", p), 10).unwrap();
        let e = comparison_series(&s, false, s.n_target).unwrap();
        let k = &*s.k1;
        assert!(k.eq_at(&e[&e1(0)], &k.one()));
        let pp = p as i64;
        assert_eq!(k.ord(&e[&e1(1)]), Some(q(pp - 1, 1) + q(1, pp - 1)));
    }
}

/// R_u: coefficient of pi^{1/2} x in the hat-reduction of pi^{u/2} x^u for
/// f = x^2 + x, from the recursion
/// R_u = -((u-2)/2) R_{u-2} - (1/2) pi^{1/2} R_{u-1}, R_0 = 0, R_1 = 1.
fn recursion(k2: &Ctx, top: usize) -> Vec<Scalar> {
    let half = k2.inv(&k2.from_int(2)).unwrap();
    let sqrt_pi = k2.pi_m_pow(1);
    let mut r = vec![k2.zero(), k2.one()];
    for u in 2..=top {
        let a = k2.mul(&k2.mul(&k2.from_int(-(u as i64 - 2)), &half), &r[u - 2]);
        let b = k2.mul(&k2.mul(&half, &sqrt_pi), &r[u - 1]);
        r.push(k2.sub(&a, &b));
    }
    r
}

#[test]
fn reduction_coefficients_of_x2_plus_x() {
    for p in [3u32, 5] {
        let pp = p as i64;
        let s = Setup::new(&poly("x^2+x", p), 12).unwrap();
        let k1 = &*s.k1;
        let k2 = &*s.km;
        let red = Reducer::new(&s, FKind::Hat, 0).unwrap();
        let j1 = s.basis.exps.iter().position(|u| *u == e1(1)).unwrap();
        let thresh = s.n_target * (pp - 1) * s.poly.m;
        let want = recursion(k2, 2 * p as usize);
        for u in 0..=2 * p as i32 {
            let (c, _) = red.reduce([(e1(u), k1.one())], thresh).unwrap();
            // raw x^u -> c_1 x = c_1 pi^{-1/2} (pi^{1/2} x), and pi^{u/2} x^u scales by pi^{u/2}
            let r = k2.shift(&k2.embed(k1, &c[j1]), u as i64 - 1);
            let diff = k2.sub(&r, &want[u as usize]);
            assert!(k2.ord(&diff).map_or(true, |o| o >= Q::from_integer(8)), "p={p} u={u}: {:?}", k2.ord(&diff));
        }
        assert_eq!(k2.ord(&want[p as usize]), Some(q(0, 1)));
        // the leading terms of R_{p+1} cancel (at p = 3, R_4 = pi^{1/2}(3/4 - pi/8)),
        // which lifts R_{p+1} and R_{2p} by 1/2 over 1/(2(p-1))
        let lifted = Some(q(1, 2) + q(1, 2 * (pp - 1)));
        assert_eq!(k2.ord(&want[p as usize + 1]), lifted);
        assert_eq!(k2.ord(&want[2 * p as usize]), lifted);
        assert!(k2.is_zero(&want[0]));
    }
}

#[test]
fn frobenius_of_linear_polynomial() {
    for p in [3u32, 5, 7] {
        let s = Setup::new(&poly("x", p), 10).unwrap();
        let fm = frobenius_matrix(&s, MatrixKind::Tilde).unwrap();
        assert_eq!(fm.entries.len(), 1);
        let md = FilteredPhiModule::from_frobenius(&s, &fm).unwrap();
        let np = md.newton_polygon(Convention::Classical).unwrap();
        assert_eq!(np.points(), vec![(0, q(0, 1)), (1, q(0, 1))]);
        let or = char_sum_oracle(&s.f, 3).unwrap();
        assert_eq!(or.degree, 1);
    }
}

#[test]
fn oracle_degrees() {
    let or = char_sum_oracle(&poly("x^2+x", 3), 6).unwrap();
    assert_eq!(or.degree, 2);
    let or = char_sum_oracle(&poly("x1^2+x2^2", 5), 4).unwrap();
    assert_eq!(or.degree, 4);
}

#[test]
fn comparison_matrix_of_x2_plus_x_is_np_dominating() {
    for p in [3u32, 5] {
        let s = Setup::new(&poly("x^2+x", p), 12).unwrap();
        let t = transform_matrix(&s, false).unwrap();
        let ti = transform_matrix(&s, true).unwrap();
        let c = check_np_dominating(&s.km, &t.entries, &ti.entries, &s.weights());
        assert!(c.holds, "p={p}: margin {}", c.margin);
        // T_inv from its own series agrees with the matrix inverse
        let inv = linalg::inverse(&s.km, &t.entries).unwrap();
        assert!(linalg::eq_to(&s.km, &inv, &ti.entries, 10 * s.km.e));
        // off-diagonal entries have ord >= p - 2
        let floor = Q::from_integer(p as i64 - 2);
        for i in 0..2 {
            for j in 0..2 {
                if i != j {
                    assert!(s.km.ord(&t.entries[i][j]).map_or(true, |o| o >= floor));
                }
            }
        }
    }
}

#[test]
fn polynomial_parsing() {
    let f = parse_poly("x1^2*x2^-1 + 3*x2", None, Arc::new(Field::new(5, 1).unwrap())).unwrap();
    assert_eq!(f.terms.len(), 2);
    assert_eq!(f.terms[&e2(2, -1)], 1);
    assert_eq!(f.terms[&e2(0, 1)], 3);
    let f = poly("x^2 + 5*x", 5);
    assert_eq!(f.terms.len(), 1);
    let f = poly("x^2+x", 3);
    assert_eq!(f.n, 1);
}
