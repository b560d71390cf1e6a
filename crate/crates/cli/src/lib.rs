//! Command runners behind the `npmod` binary. Each command returns a JSON
//! report document; `main` prints it and maps errors to exit codes.

use npmod::charp::{is_nondegenerate, parse_poly, LaurentPoly};
use npmod::ff::Field;
use npmod::frobenius::oracle::{char_sum_oracle, embed_l_poly, l_poly_agreement};
use npmod::frobenius::{frobenius_matrix, l_polynomial_from_frobenius, transform_matrix, MatrixKind, Setup};
use npmod::geometry::NewtonPolyhedron;
use npmod::io::{self, q_to_string};
use npmod::phimod::{
    auto_candidates, check_np_dominating, newton_polygon_of, weak_admissibility_report, Convention,
    FilteredPhiModule, Polygon,
};
use npmod::suite::{self, CheckRow};
use npmod::{Error, Result};
use serde_json::{json, Value};
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Frobenius,
    Polygons,
    CheckWa,
    Oracle,
    VerifyPaper,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Frobenius => "frobenius",
            Command::Polygons => "polygons",
            Command::CheckWa => "check-wa",
            Command::Oracle => "oracle",
            Command::VerifyPaper => "verify-paper",
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    /// polynomial text, or a JSON polynomial document
    pub poly: Option<String>,
    pub p: Option<u32>,
    pub a: u32,
    pub n_out: i64,
    pub kind: MatrixKind,
    pub s_max: Option<usize>,
    pub s_bound: u32,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig { poly: None, p: None, a: 1, n_out: 20, kind: MatrixKind::Tilde, s_max: None, s_bound: 6 }
    }
}

pub struct Report {
    pub doc: Value,
    /// CSV rows (header first) for commands that emit polygons or tables
    pub csv: Vec<Vec<String>>,
    /// nonzero when the command succeeded but the outcome is negative:
    /// 3 for a degenerate polynomial, 5 for a failed verification row
    pub exit_code: u8,
}

fn config_json(cmd: Command, cfg: &JobConfig) -> Value {
    json!({
        "command": cmd.name(),
        "poly": cfg.poly,
        "p": cfg.p,
        "a": cfg.a,
        "n_out": cfg.n_out,
        "kind": cfg.kind.name(),
        "s_max": cfg.s_max,
        "s_bound": cfg.s_bound,
    })
}

pub fn load_poly(cfg: &JobConfig) -> Result<LaurentPoly> {
    let text = cfg.poly.as_deref().ok_or_else(|| Error::Usage("--poly is required".into()))?;
    if text.trim_start().starts_with('{') {
        let f = io::parse_poly_json(text)?;
        if let Some(p) = cfg.p {
            if p != f.p() {
                return Err(Error::Usage(format!("-p {p} disagrees with the JSON polynomial (p = {})", f.p())));
            }
        }
        return Ok(f);
    }
    let p = cfg.p.ok_or_else(|| Error::Usage("-p is required".into()))?;
    let f = parse_poly(text, None, Arc::new(Field::new(p, cfg.a)?))?;
    if f.is_zero() {
        return Err(Error::Domain("the polynomial is zero".into()));
    }
    Ok(f)
}

fn polygon_json(pg: &Polygon) -> Value {
    json!({
        "convention": pg.convention,
        "vertices": pg.vertices().iter().map(|(x, y)| json!([x, q_to_string(y)])).collect::<Vec<_>>(),
        "points": pg.points().iter().map(|(x, y)| json!([x, q_to_string(y)])).collect::<Vec<_>>(),
        "inconclusive_segments": pg.inconclusive.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect::<Vec<_>>(),
    })
}

fn polygon_csv(rows: &mut Vec<Vec<String>>, name: &str, pg: &Polygon) {
    for (x, y) in pg.points() {
        rows.push(vec![name.into(), format!("{:?}", pg.convention).to_lowercase(), x.to_string(), q_to_string(&y)]);
    }
}

fn qs(v: &[npmod::geometry::Q]) -> Vec<String> {
    v.iter().map(q_to_string).collect()
}

fn exps_json(poly: &NewtonPolyhedron, exps: &[npmod::geometry::Exp]) -> Vec<Vec<i32>> {
    exps.iter().map(|u| u[..poly.n].to_vec()).collect()
}

fn analyze(cfg: &JobConfig) -> Result<Report> {
    let f = load_poly(cfg)?;
    let poly = NewtonPolyhedron::build(&f.support()?);
    let verdict = is_nondegenerate(&f, &poly, cfg.s_bound)?;
    let degenerate = matches!(verdict, npmod::charp::Verdict::Degenerate { .. });
    let mut doc = json!({
        "poly": f.to_text(),
        "polyhedron": io::polyhedron_to_json(&poly),
        "dim": poly.dim,
        "nondegeneracy": verdict,
    });
    let mut csv = vec![vec!["polygon".into(), "convention".into(), "x".into(), "y".into()]];
    if poly.dim == poly.n && verdict.is_nondegenerate() {
        let s = Setup::new(&f, cfg.n_out)?;
        let w = s.weights();
        let mut slopes = w.clone();
        slopes.sort();
        let hodge = Polygon::from_slopes(Convention::Classical, &slopes);
        polygon_csv(&mut csv, "hodge", &hodge);
        doc["m_np"] = json!(exps_json(&poly, &s.basis.exps));
        doc["weights"] = json!(qs(&w));
        doc["ht_length"] = json!(q_to_string(&s.basis.ht_length()));
        doc["hodge_polygon"] = polygon_json(&hodge);
    }
    Ok(Report { doc, csv, exit_code: if degenerate { 3 } else { 0 } })
}

fn checked_setup(cfg: &JobConfig) -> Result<(LaurentPoly, Setup)> {
    let f = load_poly(cfg)?;
    let s = Setup::checked(&f, cfg.n_out, cfg.s_bound)?;
    Ok((f, s))
}

fn frobenius(cfg: &JobConfig) -> Result<Report> {
    let (_, s) = checked_setup(cfg)?;
    if !matches!(cfg.kind, MatrixKind::Tilde | MatrixKind::Hat) {
        return Err(Error::Usage("--kind must be tilde or hat".into()));
    }
    let km = &*s.km;
    let n = s.n();
    let t0 = Instant::now();
    let fm = frobenius_matrix(&s, cfg.kind)?;
    let t = transform_matrix(&s, false)?;
    let ti = transform_matrix(&s, true)?;
    let doc = json!({
        "frobenius": io::matrix_to_json(km, n, &fm),
        "transform": io::matrix_to_json(km, n, &t),
        "transform_inv": io::matrix_to_json(km, n, &ti),
        "precision": {
            "n_out": s.n_out,
            "n_target": s.n_target,
            "l_max": s.dc.l_max,
            "m": km.m,
            "frobenius_rows": fm.diagnostics,
            "transform_rows": t.diagnostics,
            "transform_inv_rows": ti.diagnostics,
        },
        "runtime_ms": t0.elapsed().as_millis() as u64,
    });
    Ok(Report { doc, csv: Vec::new(), exit_code: 0 })
}

fn module(cfg: &JobConfig) -> Result<(Setup, FilteredPhiModule)> {
    let (_, s) = checked_setup(cfg)?;
    let fm = frobenius_matrix(&s, cfg.kind)?;
    let md = FilteredPhiModule::from_frobenius(&s, &fm)?;
    Ok((s, md))
}

fn polygons(cfg: &JobConfig) -> Result<Report> {
    let (_, md) = module(cfg)?;
    let hodge = md.hodge_polygon(Convention::Classical);
    let newton = md.newton_polygon(Convention::Classical)?;
    let mut csv = vec![vec!["polygon".into(), "convention".into(), "x".into(), "y".into()]];
    polygon_csv(&mut csv, "hodge", &hodge);
    polygon_csv(&mut csv, "newton", &newton);
    let doc = json!({
        "kind": cfg.kind.name(),
        "hodge": polygon_json(&hodge),
        "newton": polygon_json(&newton),
        "newton_on_or_above_hodge": newton.lies_on_or_above(&hodge),
        "same_endpoints": newton.end() == hodge.end(),
        "internal": {
            "hodge": polygon_json(&md.hodge_polygon(Convention::Internal)),
            "newton": polygon_json(&md.newton_polygon(Convention::Internal)?),
        },
    });
    Ok(Report { doc, csv, exit_code: 0 })
}

fn check_wa(cfg: &JobConfig) -> Result<Report> {
    let (s, md) = module(cfg)?;
    let rep = weak_admissibility_report(&md, &auto_candidates(&md))?;
    let t = transform_matrix(&s, false)?;
    let ti = transform_matrix(&s, true)?;
    let dom = check_np_dominating(&s.km, &t.entries, &ti.entries, &s.weights());
    let doc = json!({
        "kind": cfg.kind.name(),
        "report": rep,
        "ht_length": q_to_string(&md.ht_length()),
        "transform_np_dominating": dom,
    });
    Ok(Report { doc, csv: Vec::new(), exit_code: 0 })
}

fn oracle(cfg: &JobConfig) -> Result<Report> {
    let (f, s) = checked_setup(cfg)?;
    let s_max = cfg.s_max.unwrap_or(2 * s.poly.nvol as usize);
    let or = char_sum_oracle(&f, s_max)?;
    let fm = frobenius_matrix(&s, cfg.kind)?;
    let lf = l_polynomial_from_frobenius(&s, &fm)?;
    let agree = l_poly_agreement(&s, &lf, &or);
    let tol = npmod::geometry::Q::from_integer(cfg.n_out - 4);
    let lo = embed_l_poly(&s.k1, &s.dc.gamma, &or.l_poly, s.k1.zq.r as i64);
    let a = s.k1.a;
    let np_oracle = newton_polygon_of(&s.k1, &lo, a, Convention::Classical)?;
    let np_frob = newton_polygon_of(&s.km, &lf, a, Convention::Classical)?;
    let same = np_oracle == np_frob;
    let doc = json!({
        "sums": or.sums,
        "l_poly": or.l_poly,
        "degree": or.degree,
        "agreement_ord": q_to_string(&agree),
        "agrees_mod_p^(N_out-4)": agree >= tol,
        "newton_oracle": polygon_json(&np_oracle),
        "newton_frobenius": polygon_json(&np_frob),
        "newton_polygons_equal": same,
    });
    Ok(Report { doc, csv: Vec::new(), exit_code: if agree >= tol && same { 0 } else { 5 } })
}

fn verify_paper(cfg: &JobConfig) -> Result<Report> {
    let ps: Vec<u32> = match cfg.p {
        Some(p) => vec![p],
        None => vec![3, 5],
    };
    let mut rows: Vec<CheckRow> = Vec::new();
    for &p in &ps {
        rows.extend(suite::dwork_rows(p as u64, cfg.n_out)?);
    }
    rows.extend(suite::curve_rows(cfg.n_out)?);
    for &p in &ps {
        rows.extend(suite::comparison_rows(p, cfg.n_out)?);
    }
    rows.extend(suite::agreeable_rows(cfg.n_out)?);
    let failed = rows.iter().any(|r| !r.pass);
    let mut csv = vec![vec!["check".into(), "expected".into(), "observed".into(), "status".into()]];
    for r in &rows {
        csv.push(vec![r.name.clone(), r.expected.clone(), r.observed.clone(), if r.pass { "PASS" } else { "FAIL" }.into()]);
    }
    Ok(Report { doc: json!({ "rows": rows }), csv, exit_code: if failed { 5 } else { 0 } })
}

/// Run one command and wrap its result with the configuration and timing.
pub fn run(cmd: Command, cfg: &JobConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = match cmd {
        Command::Analyze => analyze(cfg)?,
        Command::Frobenius => frobenius(cfg)?,
        Command::Polygons => polygons(cfg)?,
        Command::CheckWa => check_wa(cfg)?,
        Command::Oracle => oracle(cfg)?,
        Command::VerifyPaper => verify_paper(cfg)?,
    };
    rep.doc = json!({
        "config": config_json(cmd, cfg),
        "provenance": {
            "npmod_version": env!("CARGO_PKG_VERSION"),
            "runtime_ms": t0.elapsed().as_millis() as u64,
        },
        "result": rep.doc,
    });
    Ok(rep)
}
