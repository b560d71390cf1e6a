use clap::{Args, Parser, Subcommand};
use npmod::frobenius::MatrixKind;
use npmod_cli::{run, Command, JobConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Newton polyhedron Phi-modules of exponential sums.
///
/// Exit codes: 0 success, 1 usage or domain error, 2 parse error,
/// 3 degenerate input, 4 precision exhausted, 5 verification failure.
#[derive(Parser)]
#[command(name = "npmod", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Polyhedron, nondegeneracy, monomial basis, weights and Hodge polygon
    Analyze(Opts),
    /// Frobenius and comparison matrices with the precision ledger
    Frobenius(Opts),
    /// Hodge and Newton polygons
    Polygons(Opts),
    /// Weak-admissibility report
    CheckWa(Opts),
    /// Exhaustive character sums and the L-function, compared with the Frobenius side
    Oracle(Opts),
    /// Table of the built-in example checks
    VerifyPaper(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// polynomial text, a JSON polynomial, or a file holding either
    #[arg(long)]
    poly: Option<String>,
    #[arg(short = 'p')]
    p: Option<u32>,
    #[arg(short = 'a', default_value_t = 1)]
    a: u32,
    /// output precision N_out (p-adic digits)
    #[arg(short = 'N', default_value_t = 20)]
    n_out: i64,
    #[arg(long, default_value = "tilde")]
    kind: String,
    /// number of character sums for the oracle (default 2 * nvol)
    #[arg(long)]
    smax: Option<usize>,
    /// largest extension degree searched by the nondegeneracy test
    #[arg(long, default_value_t = 6)]
    s_bound: u32,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn config(o: &Opts) -> Result<JobConfig, npmod::Error> {
    let poly = match &o.poly {
        Some(s) if std::path::Path::new(s).is_file() => Some(
            std::fs::read_to_string(s).map_err(|e| npmod::Error::Usage(format!("cannot read {s}: {e}")))?,
        ),
        other => other.clone(),
    };
    Ok(JobConfig {
        poly,
        p: o.p,
        a: o.a,
        n_out: o.n_out,
        kind: MatrixKind::parse(&o.kind)?,
        s_max: o.smax,
        s_bound: o.s_bound,
    })
}

fn write_csv(path: &PathBuf, rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, opts) = match cli.cmd {
        Cmd::Analyze(o) => (Command::Analyze, o),
        Cmd::Frobenius(o) => (Command::Frobenius, o),
        Cmd::Polygons(o) => (Command::Polygons, o),
        Cmd::CheckWa(o) => (Command::CheckWa, o),
        Cmd::Oracle(o) => (Command::Oracle, o),
        Cmd::VerifyPaper(o) => (Command::VerifyPaper, o),
    };
    let result = config(&opts).and_then(|cfg| run(cmd, &cfg));
    let rep = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("npmod {}: {e}", cmd.name());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = serde_json::to_string_pretty(&rep.doc).expect("report serializes");
    println!("{text}");
    if let Some(path) = &opts.json {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if let Some(path) = &opts.csv {
        if let Err(e) = write_csv(path, &rep.csv) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if cmd == Command::VerifyPaper {
        for r in rep.doc["result"]["rows"].as_array().into_iter().flatten() {
            let status = if r["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            eprintln!("{}: expected {}, observed {}: {status}", r["name"], r["expected"], r["observed"]);
        }
    }
    ExitCode::from(rep.exit_code)
}
