mod args;
mod sources;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use freespec::dilation::{decompose_to_free_extremes, DilationOptions};
use freespec::extreme::{classify_with, ClassifyOptions};
use freespec::json::{self, combination_from_value, decomposition_to_value, search_report_to_value, tuple_to_value};
use freespec::oracles::{refute_matrix_extreme, search_nontrivial_dilation, verify_combination};
use freespec::pencil::{mconv_certificate, membership, polar_dual_check};
use freespec::{ErrorKind, MatrixTuple, SolverOptions, Tolerances};
use rayon::prelude::*;
use serde_json::{json, Value};

use args::{Cli, Command, OracleKind};
use sources::{read_json, resolve_points, resolve_set, SetSource};

/// Why a run failed; each maps to one exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(freespec::Error),
}

impl From<freespec::Error> for Failure {
    fn from(e: freespec::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Domain => 1,
                ErrorKind::Numerical => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

fn tolerances(cli: &Cli) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(f) = cli.tol_feas {
        tol = tol.with_feas(f);
    }
    if let Some(k) = cli.tol_ker {
        tol = tol.with_ker(k);
    }
    tol
}

fn emit(cli: &Cli, v: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Usage(format!("stdout: {e}")))
        }
    }
}

/// Applies `f` to every point (in parallel with `--jobs`), preserving order.
/// A batch reports per-point errors inline and fails with the first one.
fn per_point<F>(cli: &Cli, points: &[MatrixTuple], batch: bool, f: F) -> Result<Value, Failure>
where
    F: Fn(&MatrixTuple) -> Result<Value, Failure> + Sync,
{
    let results: Vec<Result<Value, Failure>> = if cli.jobs > 1 && points.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build()
            .map_err(|e| Failure::Usage(format!("--jobs: {e}")))?;
        pool.install(|| points.par_iter().map(&f).collect())
    } else {
        points.iter().map(&f).collect()
    };
    if !batch {
        return results.into_iter().next().unwrap_or_else(|| Err(Failure::Usage("no point given".into())));
    }
    let mut first_err = None;
    let values = results
        .into_iter()
        .map(|r| match r {
            Ok(v) => v,
            Err(e) => {
                let v = json!({ "error": e.message(), "exit_code": e.exit_code() });
                first_err.get_or_insert(e);
                v
            }
        })
        .collect();
    let out = Value::Array(values);
    match first_err {
        Some(e) => {
            emit(cli, &out)?;
            Err(e)
        }
        None => Ok(out),
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let tol = tolerances(cli);
    let set_for = |cli: &Cli| resolve_set(cli.set.as_deref(), &tol);
    let points_for = |cli: &Cli, set: Option<&SetSource>, count: usize| resolve_points(cli.point.as_deref(), set, cli.seed, count, &tol);
    let out = match &cli.command {
        Command::Member => {
            let set = set_for(cli)?;
            let pts = points_for(cli, Some(&set), 1)?;
            per_point(cli, &pts.points, pts.batch, |x| Ok(serde_json::to_value(membership(&set.pencil, x, &tol)?).expect("serializable")))?
        }
        Command::Classify { conj_closed } => {
            let set = set_for(cli)?;
            let pts = points_for(cli, Some(&set), 1)?;
            let opts = ClassifyOptions { conj_closed: *conj_closed };
            per_point(cli, &pts.points, pts.batch, |x| Ok(serde_json::to_value(classify_with(&set.pencil, x, &tol, opts)?).expect("serializable")))?
        }
        Command::Decompose { presplit } => {
            let set = set_for(cli)?;
            let pts = points_for(cli, Some(&set), 1)?;
            let opts = DilationOptions {
                solver: SolverOptions { trace: cli.verbose, ..SolverOptions::from_tolerances(&tol) },
                seed: cli.seed,
                presplit: *presplit,
            };
            per_point(cli, &pts.points, pts.batch, |x| Ok(decomposition_to_value(&decompose_to_free_extremes(&set.pencil, x, &tol, &opts)?)))?
        }
        Command::MconvMember => {
            let set = set_for(cli)?;
            let pts = points_for(cli, Some(&set), 1)?;
            per_point(cli, &pts.points, pts.batch, |y| {
                let cert = mconv_certificate(set.pencil.coefficients(), y, &tol)?;
                Ok(json!({
                    "member": cert.member,
                    "margin": cert.margin,
                    "combination": cert.combination.as_ref().map(json::combination_to_value),
                }))
            })?
        }
        Command::DualCheck { samples } => {
            let set = set_for(cli)?;
            let pts = points_for(cli, Some(&set), 1)?;
            per_point(cli, &pts.points, pts.batch, |y| {
                let ok = polar_dual_check(&set.pencil, y, *samples, cli.seed, &tol)?;
                Ok(json!({ "consistent": ok, "samples": samples, "seed": cli.seed }))
            })?
        }
        Command::Example => {
            let set = set_for(cli)?;
            let mut v = json::pencil_to_value(&set.pencil);
            v["name"] = json!(set.name);
            if let Some(named) = &set.named {
                v["meta"] = serde_json::to_value(&named.meta).expect("serializable");
            }
            v
        }
        Command::Sample { count } => {
            if *count == 0 {
                return Err(Failure::Usage("--count must be at least 1".into()));
            }
            let set = if cli.set.is_some() { Some(set_for(cli)?) } else { None };
            let pts = points_for(cli, set.as_ref(), *count)?;
            let vals: Vec<Value> = pts.points.iter().map(tuple_to_value).collect();
            if pts.batch { Value::Array(vals) } else { vals.into_iter().next().expect("one point") }
        }
        Command::Oracle { kind, trials, combination } => {
            let set = set_for(cli)?;
            let pts = points_for(cli, Some(&set), 1)?;
            match kind {
                OracleKind::Dilation => per_point(cli, &pts.points, pts.batch, |x| {
                    Ok(search_report_to_value(&search_nontrivial_dilation(&set.pencil, x, *trials, cli.seed, &tol)?))
                })?,
                OracleKind::Refute => per_point(cli, &pts.points, pts.batch, |x| {
                    Ok(search_report_to_value(&refute_matrix_extreme(&set.pencil, x, *trials, cli.seed, &tol)?))
                })?,
                OracleKind::Verify => {
                    let path = combination.as_ref().ok_or_else(|| Failure::Usage("oracle verify needs --combination".into()))?;
                    let comb = combination_from_value(&read_json(path)?, &tol)?;
                    per_point(cli, &pts.points, pts.batch, |x| Ok(json!({ "valid": verify_combination(&comb, x, &tol) })))?
                }
            }
        }
    };
    emit(cli, &out)
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = if cli.verbose { log::LevelFilter::Debug } else { log::LevelFilter::Warn };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("freespec: {}", f.message());
            f.exit_code()
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}
