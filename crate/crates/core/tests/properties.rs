use npmod::charp::{parse_poly, LaurentPoly};
use npmod::ff::Field;
use npmod::frobenius::oracle::{newton_coeffs, power_sums, Cyclo};
use npmod::geometry::{exp_add, exp_scale, Exp, NewtonPolyhedron, Q, MAX_N};
use npmod::io;
use npmod::linalg::{self, Mat};
use npmod::padic::{Ctx, Scalar};
use npmod::phimod::{Convention, FilteredPhiModule, Normalization, Polygon};
use num_bigint::BigInt;
use proptest::prelude::*;
use std::sync::Arc;

const PREC: i64 = 20;

fn ctx(p: u64, a: usize, m: i64) -> Arc<Ctx> {
    Ctx::new(p, a, m, PREC).unwrap()
}

/// (teichmuller residue, integer multiplier, pi_m power)
type ScalarSeed = (u32, i64, i64);

fn scalar(k: &Ctx, (c, n, v): ScalarSeed) -> Scalar {
    let q = k.zq.fq.q() as u32;
    let t = k.teichmuller(1 + c % (q - 1));
    k.mul(&k.mul(&t, &k.from_int(n)), &k.pi_m_pow(v))
}

fn seed() -> impl Strategy<Value = ScalarSeed> {
    (0u32..1000, -50i64..50, 0i64..6)
}

fn field() -> impl Strategy<Value = (u64, usize, i64)> {
    (prop::sample::select(vec![3u64, 5, 7]), 1usize..=2, 1i64..=3)
}

/// Equality at the precision both sides carry.
fn close(k: &Ctx, x: &Scalar, y: &Scalar) -> bool {
    k.eq_at(x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring_axioms((p, a, m) in field(), x in seed(), y in seed(), z in seed()) {
        let k = ctx(p, a, m);
        let (x, y, z) = (scalar(&k, x), scalar(&k, y), scalar(&k, z));
        prop_assert!(close(&k, &k.add(&x, &y), &k.add(&y, &x)));
        prop_assert!(close(&k, &k.mul(&x, &y), &k.mul(&y, &x)));
        prop_assert!(close(&k, &k.mul(&k.mul(&x, &y), &z), &k.mul(&x, &k.mul(&y, &z))));
        prop_assert!(close(&k, &k.mul(&x, &k.add(&y, &z)), &k.add(&k.mul(&x, &y), &k.mul(&x, &z))));
        prop_assert!(k.is_zero(&k.sub(&x, &x)));
    }

    #[test]
    fn valuation_is_multiplicative_and_inverse_round_trips((p, a, m) in field(), x in seed(), y in seed()) {
        let k = ctx(p, a, m);
        let (x, y) = (scalar(&k, x), scalar(&k, y));
        prop_assume!(!k.is_zero(&x) && !k.is_zero(&y));
        prop_assert_eq!(k.ord(&k.mul(&x, &y)), Some(k.ord(&x).unwrap() + k.ord(&y).unwrap()));
        let xi = k.inv(&x).unwrap();
        prop_assert!(close(&k, &k.mul(&x, &xi), &k.one()));
    }

    #[test]
    fn sigma_is_a_ring_automorphism_of_order_a((p, a, m) in field(), x in seed(), y in seed()) {
        let k = ctx(p, a, m);
        let (x, y) = (scalar(&k, x), scalar(&k, y));
        prop_assert!(close(&k, &k.sigma(&k.mul(&x, &y)), &k.mul(&k.sigma(&x), &k.sigma(&y))));
        prop_assert!(close(&k, &k.sigma(&k.add(&x, &y)), &k.add(&k.sigma(&x), &k.sigma(&y))));
        prop_assert!(close(&k, &k.sigma_pow(&x, a as i64), &x));
        prop_assert!(close(&k, &k.sigma(&k.pi()), &k.pi()));
    }

    #[test]
    fn uniformizer_relation(p in prop::sample::select(vec![3u64, 5, 7]), m in 1i64..=4) {
        let k = ctx(p, 1, m);
        let lhs = k.pow(&k.pi_m_pow(1), (m * (p as i64 - 1)) as u64);
        prop_assert!(close(&k, &lhs, &k.from_int(-(p as i64))));
    }
}

fn random_module(k: &Arc<Ctx>, entries: &[ScalarSeed], ht: &[Q], norm: Normalization) -> FilteredPhiModule {
    let d = ht.len();
    let mut a = linalg::identity(k, d);
    for i in 0..d {
        for j in 0..d {
            let x = scalar(k, entries[(i * d + j) % entries.len()]);
            a[i][j] = k.add(&a[i][j], &k.mul(&x, &k.from_int(k.p as i64)));
        }
    }
    FilteredPhiModule::new(k.clone(), ht.to_vec(), a, norm, PREC).unwrap()
}

fn ht_weights(raw: &[i64], m: i64) -> Vec<Q> {
    let mut h: Vec<Q> = raw.iter().map(|&x| Q::new(-x, m)).collect();
    h.sort();
    h
}

fn diag(k: &Ctx, d: &[Scalar]) -> Mat {
    let mut out = linalg::zeros(k, d.len(), d.len());
    for (i, x) in d.iter().enumerate() {
        out[i][i] = x.clone();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Rebasing e'_i = d_i e_i turns A into sigma(D) A D^-1; checked against
    /// the semilinear action on coordinates.
    #[test]
    fn frobenius_semilinearity_under_diagonal_change(
        p in prop::sample::select(vec![3u64, 5]),
        entries in prop::collection::vec(seed(), 9),
        dseeds in prop::collection::vec(seed(), 3),
        v in prop::collection::vec(seed(), 3),
    ) {
        let k = ctx(p, 2, 2);
        let md = random_module(&k, &entries, &[Q::from_integer(0); 3], Normalization::Np);
        let dvals: Vec<Scalar> = dseeds.iter().map(|s| scalar(&k, *s)).collect();
        prop_assume!(dvals.iter().all(|x| !k.is_zero(x)));
        let dinv: Vec<Scalar> = dvals.iter().map(|x| k.inv(x).unwrap()).collect();
        let sd: Vec<Scalar> = dvals.iter().map(|x| k.sigma(x)).collect();
        let a2 = linalg::mul(&k, &linalg::mul(&k, &diag(&k, &sd), &md.matrix), &diag(&k, &dinv));
        let md2 = FilteredPhiModule::new(k.clone(), md.ht_weights.clone(), a2, Normalization::Np, PREC).unwrap();
        // v in the new coordinates is sum v_j d_j e_j in the old ones
        let v: Vec<Scalar> = v.iter().map(|s| scalar(&k, *s)).collect();
        let v_old: Vec<Scalar> = v.iter().zip(&dvals).map(|(x, d)| k.mul(x, d)).collect();
        let img_new: Vec<Scalar> = md2.apply(&v).iter().zip(&dvals).map(|(x, d)| k.mul(x, d)).collect();
        let img_old = md.apply(&v_old);
        for (x, y) in img_new.iter().zip(&img_old) {
            prop_assert!(close(&k, x, y));
        }
        prop_assert_eq!(md2.newton_number().ok(), md.newton_number().ok());
    }

    /// The normalization change is the diagonal rebasing by pi^{p w}.
    #[test]
    fn normalization_is_a_diagonal_conjugation(
        p in prop::sample::select(vec![3u64, 5]),
        entries in prop::collection::vec(seed(), 9),
        raw in prop::collection::vec(0i64..4, 3),
    ) {
        let m = 2;
        let k = ctx(p, 1, m);
        let ht = ht_weights(&raw, m);
        let md = random_module(&k, &entries, &ht, Normalization::Classical);
        let np = md.to_np();
        let pw: Vec<Scalar> = (0..3).map(|j| k.pi_m_pow(-(p as i64) * (ht[j] * Q::from_integer(m)).to_integer())).collect();
        let pw_inv: Vec<Scalar> = pw.iter().map(|x| k.inv(x).unwrap()).collect();
        let want = linalg::mul(&k, &linalg::mul(&k, &diag(&k, &pw), &md.matrix), &diag(&k, &pw_inv));
        prop_assert!(linalg::eq_to(&k, &np.matrix, &want, (PREC - 4) * k.e));
        prop_assert_eq!(np.newton_number().ok(), md.newton_number().ok());
        prop_assert!(linalg::eq_to(&k, &np.to_classical().matrix, &md.matrix, (PREC - 4) * k.e));
    }

    #[test]
    fn polygons_from_slopes_are_convex(num in prop::collection::vec(-12i64..12, 0..8), den in 1i64..7) {
        let slopes: Vec<Q> = num.iter().map(|&n| Q::new(n, den)).collect();
        let pg = Polygon::from_slopes(Convention::Internal, &slopes);
        prop_assert!(pg.is_convex());
        prop_assert_eq!(pg.len(), slopes.len());
        prop_assert_eq!(pg.end(), slopes.iter().sum::<Q>());
        prop_assert!(pg.lies_on_or_above(&pg));
        prop_assert!(den % pg.max_slope_denominator() == 0);
        let back = pg.negated().negated();
        prop_assert_eq!(back.points(), pg.points());
        prop_assert!(pg.negated().is_convex());
    }

    /// A diagonal Frobenius with eigenvalues p^{ht_j} has Newton polygon equal
    /// to the Hodge polygon; entries above the diagonal do not move it.
    #[test]
    fn newton_polygon_of_hodge_diagonal(raw in prop::collection::vec(0i64..4, 1..4), up in prop::collection::vec(seed(), 6)) {
        let m = 2;
        let k = ctx(3, 1, m);
        let ht = ht_weights(&raw, m);
        let d: Vec<Scalar> = ht.iter().map(|h| k.pi_m_pow(k.e * h.numer() / h.denom())).collect();
        let mut a = diag(&k, &d);
        let n = ht.len();
        for i in 0..n {
            for j in i + 1..n {
                a[i][j] = k.mul(&scalar(&k, up[(i * n + j) % up.len()]), &d[j]);
            }
        }
        let md = FilteredPhiModule::new(k.clone(), ht.clone(), a, Normalization::Np, PREC).unwrap();
        let newton = md.newton_polygon(Convention::Classical).unwrap();
        let hodge = md.hodge_polygon(Convention::Classical);
        prop_assert!(newton.is_convex());
        prop_assert!(newton.lies_on_or_above(&hodge));
        prop_assert_eq!(newton.points(), hodge.points());
        prop_assert_eq!(md.newton_number().unwrap(), md.hodge_number());
    }
}

fn segment(lo: i32, hi: i32) -> NewtonPolyhedron {
    let mut pts: Vec<Exp> = Vec::new();
    for x in [lo, hi] {
        let mut u = [0; MAX_N];
        u[0] = x;
        pts.push(u);
    }
    NewtonPolyhedron::build(&npmod::geometry::SupportSet::new(1, pts).unwrap())
}

fn plane_poly(pts: &[(i32, i32)]) -> Option<NewtonPolyhedron> {
    let ex: Vec<Exp> = pts.iter().map(|&(x, y)| [x, y, 0, 0]).collect();
    let pl = NewtonPolyhedron::build(&npmod::geometry::SupportSet::new(2, ex).ok()?);
    (pl.dim == 2).then_some(pl)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segment_volume_and_weights(lo in -6i32..0, hi in 1i32..7, u in -20i32..20, k in 1i32..5) {
        let pl = segment(lo, hi);
        prop_assert_eq!(pl.nvol, (hi - lo) as i64);
        let mut e = [0; MAX_N];
        e[0] = u;
        let w = pl.weight(&e).unwrap();
        let want = if u >= 0 { Q::new(u as i64, hi as i64) } else { Q::new(-u as i64, -lo as i64) };
        prop_assert_eq!(w, want);
        prop_assert_eq!(pl.weight(&exp_scale(&e, k)).unwrap(), w * Q::from_integer(k as i64));
    }

    /// The weight is a gauge: homogeneous and subadditive, additive on
    /// cofacial pairs.
    #[test]
    fn weight_is_a_gauge(
        pts in prop::collection::vec((-3i32..4, -3i32..4), 2..5),
        u in (-6i32..7, -6i32..7),
        v in (-6i32..7, -6i32..7),
    ) {
        let Some(pl) = plane_poly(&pts) else { return Ok(()) };
        let (u, v): (Exp, Exp) = ([u.0, u.1, 0, 0], [v.0, v.1, 0, 0]);
        prop_assume!(pl.in_cone(&u) && pl.in_cone(&v));
        let (wu, wv) = (pl.weight(&u).unwrap(), pl.weight(&v).unwrap());
        let wuv = pl.weight(&exp_add(&u, &v)).unwrap();
        prop_assert!(wuv <= wu + wv);
        if pl.cofacial(&u, &v).unwrap() {
            prop_assert_eq!(wuv, wu + wv);
        }
        prop_assert_eq!(pl.weight(&exp_scale(&u, 3)).unwrap(), wu * Q::from_integer(3));
        prop_assert!((wu * Q::from_integer(pl.m)).is_integer());
    }
}

fn random_poly(p: u32, terms: &[((i32, i32), u32)]) -> Option<LaurentPoly> {
    let mut f = LaurentPoly::new(2, Arc::new(Field::new(p, 1).unwrap())).ok()?;
    for &((x, y), c) in terms {
        f.add_term([x, y, 0, 0], c % p);
    }
    (!f.is_zero()).then_some(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..100) {
        let q = Q::new(n, d);
        prop_assert_eq!(io::parse_q(&io::q_to_string(&q)).unwrap(), q);
    }

    #[test]
    fn polynomial_text_and_json_round_trip(
        p in prop::sample::select(vec![3u32, 5, 7]),
        terms in prop::collection::vec(((-4i32..5, -4i32..5), 0u32..7), 1..6),
    ) {
        let Some(f) = random_poly(p, &terms) else { return Ok(()) };
        let g = parse_poly(&f.to_text(), Some(2), f.fq.clone()).unwrap();
        prop_assert_eq!(&g.terms, &f.terms);
        let j = serde_json::to_string(&io::poly_to_json(&f)).unwrap();
        let h = io::parse_poly_json(&j).unwrap();
        prop_assert_eq!(&h.terms, &f.terms);
    }

    #[test]
    fn scalar_json_round_trip((p, a, m) in field(), x in seed(), cap in 1i64..15) {
        let k = ctx(p, a, m);
        let x = k.with_prec(&scalar(&k, x), cap * k.e);
        let j = serde_json::to_string(&io::scalar_to_json(&k, &x)).unwrap();
        let y = io::parse_scalar_json(&k, &j).unwrap();
        prop_assert!(k.eq_at(&x, &y));
        prop_assert_eq!(k.prec_ord(&x), k.prec_ord(&y));
    }

    #[test]
    fn polyhedron_json_round_trip(pts in prop::collection::vec((-3i32..4, -3i32..4), 2..5)) {
        let Some(pl) = plane_poly(&pts) else { return Ok(()) };
        let j = serde_json::to_string(&io::polyhedron_to_json(&pl)).unwrap();
        let back = io::parse_polyhedron_json(&j).unwrap();
        prop_assert_eq!(back.nvol, pl.nvol);
        prop_assert_eq!(back.m, pl.m);
        prop_assert_eq!(back.vertices, pl.vertices);
    }

    #[test]
    fn module_json_round_trip(
        p in prop::sample::select(vec![3u64, 5]),
        entries in prop::collection::vec(seed(), 4),
        raw in prop::collection::vec(0i64..4, 2),
    ) {
        let k = ctx(p, 1, 2);
        let md = random_module(&k, &entries, &ht_weights(&raw, 2), Normalization::Np);
        let j = serde_json::to_string(&io::module_to_json(&md)).unwrap();
        let back = io::parse_module_json(&j).unwrap();
        prop_assert_eq!(&back.ht_weights, &md.ht_weights);
        let mm = linalg::embed(&back.k, &md.k, &md.matrix);
        prop_assert!(linalg::eq_to(&back.k, &back.matrix, &mm, (PREC - 2) * back.k.e));
    }

    /// Newton's identities invert the power sums of a polynomial.
    #[test]
    fn newton_identities_round_trip(p in prop::sample::select(vec![3u64, 5]), cs in prop::collection::vec(-20i64..20, 1..5)) {
        let mut coeffs = vec![Cyclo::from_int(p, BigInt::from(1))];
        coeffs.extend(cs.iter().map(|&c| Cyclo::from_int(p, BigInt::from(c))));
        let s = coeffs.len() - 1;
        let ps = power_sums(&coeffs, s, p);
        let back = newton_coeffs(&ps, p).unwrap();
        for (x, y) in back.iter().zip(&coeffs) {
            prop_assert!(x.sub(y).is_zero());
        }
    }
}
