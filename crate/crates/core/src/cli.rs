//! Command-line front end: every verification suite and the search, reporting
//! NDJSON (or CSV for flat tables) on stdout and diagnostics on stderr.
//!
//! Exit codes: 0 when everything holds, 1 when a proven statement fails, 2 on
//! usage errors. A violation of the open conjecture is flagged on stderr as a
//! finding and does not change the exit code.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imfunc::{self, Grid, IMParams};
use crate::matcore::{self, ComplexMatrix};
use crate::monogamy;
use crate::permlemma::{self, SpectrumVector};
use crate::qstate::{self, Dims};
use crate::report::{InequalityReport, TAU_CHECK};
use crate::search::{self, Instance, SearchConfig, Target};
use crate::selftest;
use crate::specialcase;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ndjson,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "negmono",
    version,
    about = "Monogamy-of-negativity verification and counterexample search"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for every random draw.
    #[arg(long, global = true, env = "NEGMONO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for holds/violation decisions.
    #[arg(long, global = true, default_value_t = TAU_CHECK)]
    pub tol: f64,
    /// Output format; CSV is available for flat tables only.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write reports here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan random states against the conjecture and its proven consequences.
    VerifyConjecture {
        /// Local dimensions as AxBxC.
        #[arg(long, default_value = "2x2x2")]
        dims: Dims,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Step-by-step trace of the proven special case for a given or random B.
    SpecialCase {
        /// Matrix JSON file; non-square input is zero-padded.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Exhaustive sweeps of the commutative permutation lemma over S_d.
    PermLemma {
        #[arg(long, default_value_t = 5)]
        d: usize,
        /// Number of random spectra to sweep.
        #[arg(long, visible_alias = "samples", default_value_t = 10)]
        trials: usize,
        /// Comma-separated spectrum to sweep instead of random ones.
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
    },
    /// Trace maximization check against brute force over S_d.
    DruryCheck {
        /// Matrix JSON file with one B; random B of size d otherwise.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Sup-error table of the smooth approximants of sqrt(x_+).
    ImApprox {
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        s_list: Vec<f64>,
        /// Lattice as lo:hi:n.
        #[arg(long, default_value = "-10:10:2001", allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
        /// Levels for the curvature pair check.
        #[arg(long, default_value_t = 100)]
        levels: usize,
    },
    /// Random restarts plus local descent toward minimal slack.
    Search {
        /// One of ineq4, ineqid, ineqid1, ineqid2, commutative.
        #[arg(long, default_value = "ineq4")]
        target: Target,
        #[arg(long, default_value = "2x2x2")]
        dims: Dims,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0.1)]
        step_scale: f64,
    },
    /// The full acceptance suite.
    Selftest {
        /// Run only these criteria (comma-separated ids).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

/// One checked inequality, flattened for tables.
#[derive(Debug, Serialize)]
pub struct ReportRow {
    pub trial: usize,
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub proven: bool,
}

impl ReportRow {
    fn new(trial: usize, r: &InequalityReport, tol: f64, proven: bool) -> Self {
        Self {
            trial,
            name: r.name.clone(),
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            holds: r.slack >= -tol,
            proven,
        }
    }

    fn with_holds(mut self, holds: bool) -> Self {
        self.holds = holds;
        self
    }
}

/// `M` and `P` are vectors in NDJSON and space-joined strings in CSV.
#[derive(Debug, Serialize)]
struct SweepRow<M = Vec<f64>, P = Vec<usize>> {
    trial: usize,
    d: usize,
    mu: M,
    count: usize,
    violations: usize,
    worst_slack: f64,
    arg_worst: P,
}

impl SweepRow {
    fn joined(&self) -> SweepRow<String, String> {
        SweepRow {
            trial: self.trial,
            d: self.d,
            mu: join(&self.mu),
            count: self.count,
            violations: self.violations,
            worst_slack: self.worst_slack,
            arg_worst: join(&self.arg_worst),
        }
    }
}

#[derive(Debug, Serialize)]
struct SupErrorRow {
    s: f64,
    sup_error: f64,
    argmax: f64,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct TraceRecord<'a> {
    trial: usize,
    holds: bool,
    #[serde(flatten)]
    trace: &'a specialcase::SpecialCaseTrace,
}

struct Output {
    writer: Box<dyn Write>,
    format: Format,
}

impl Output {
    fn rows<T: Serialize>(&mut self, rows: &[T]) -> Result<()> {
        match self.format {
            Format::Ndjson => {
                for r in rows {
                    serde_json::to_writer(&mut self.writer, r)?;
                    self.writer.write_all(b"\n")?;
                }
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut self.writer);
                for r in rows {
                    w.serialize(r).map_err(csv_error)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    fn record<T: Serialize>(&mut self, value: &T) -> Result<()> {
        if self.format == Format::Csv {
            return Err(Error::InvalidParameter(
                "this command produces nested records; use --format ndjson".into(),
            ));
        }
        self.rows(std::slice::from_ref(value))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

fn finding(msg: &str) {
    eprintln!("FINDING: {msg}");
}

fn read_matrix(path: &PathBuf) -> Result<ComplexMatrix> {
    matcore::matrix_from_json(&std::fs::read_to_string(path)?)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn verify_conjecture(g: &GlobalOpts, out: &mut Output, dims: Dims, trials: usize) -> Result<i32> {
    let cfg = SearchConfig {
        dims,
        seed: g.seed,
        ..SearchConfig::new(Target::Ineq4)
    };
    let per_trial: Vec<Result<Vec<ReportRow>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let Instance::State { state } = search::random_instance(&cfg, t as u64) else {
                unreachable!("ineq4 instances are states")
            };
            let cm = qstate::coeff_matrices(&state);
            let (mono_ab, mono_ac) = monogamy::monotonicity_report(&state)?;
            let (tri, cs) = monogamy::single_term_bound(&cm)?;
            let (z1, z2) = monogamy::ineq4_term_reports(&cm)?;
            let mut rows = vec![
                ReportRow::new(t, &monogamy::ineq4_report(&cm)?, g.tol, false),
                ReportRow::new(t, &monogamy::ineq2_report(&state)?, g.tol, false),
                ReportRow::new(t, &monogamy::ineq3_report(&cm)?, g.tol, false),
            ];
            for r in [mono_ab, mono_ac, tri, cs, z1, z2] {
                rows.push(ReportRow::new(t, &r, g.tol, true));
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::with_capacity(trials * 9);
    for r in per_trial {
        rows.extend(r?);
    }
    out.rows(&rows)?;
    summarize(&rows)
}

/// Reports failures on stderr and picks the exit code.
fn summarize(rows: &[ReportRow]) -> Result<i32> {
    let mut code = EXIT_OK;
    for r in rows.iter().filter(|r| !r.holds) {
        if r.proven {
            eprintln!(
                "violation of proven statement {} at trial {}: slack {:.3e}",
                r.name, r.trial, r.slack
            );
            code = EXIT_VIOLATION;
        } else {
            finding(&format!(
                "{} violated at trial {}: slack {:.3e}",
                r.name, r.trial, r.slack
            ));
        }
    }
    let min = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    eprintln!("{} reports, min slack {min:.3e}", rows.len());
    Ok(code)
}

fn special_case(
    g: &GlobalOpts,
    out: &mut Output,
    file: Option<&PathBuf>,
    d: usize,
    trials: usize,
) -> Result<i32> {
    let inputs: Vec<ComplexMatrix> = match file {
        Some(path) => vec![specialcase::pad_square(&read_matrix(path)?)],
        None => {
            let mut r = rng(g.seed, 0);
            (0..trials)
                .map(|_| matcore::random_gaussian(d, d, &mut r))
                .collect()
        }
    };
    let traces: Vec<_> = inputs
        .par_iter()
        .map(specialcase::interlacing_trace_unchecked)
        .collect();
    let mut code = EXIT_OK;
    let mut table = Vec::new();
    for (t, trace) in traces.into_iter().enumerate() {
        let trace = trace?;
        // step checks carry their own scale-aware tolerance
        let holds = trace.all_hold();
        if !holds {
            code = EXIT_VIOLATION;
            for r in trace.reports.iter().filter(|r| !r.holds) {
                eprintln!(
                    "violation of proven statement {} at trial {t}: slack {:.3e}",
                    r.name, r.slack
                );
            }
        }
        match out.format {
            Format::Ndjson => out.record(&TraceRecord {
                trial: t,
                holds,
                trace: &trace,
            })?,
            Format::Csv => table.extend(
                trace
                    .reports
                    .iter()
                    .map(|r| ReportRow::new(t, r, f64::INFINITY, true).with_holds(r.holds)),
            ),
        }
    }
    if out.format == Format::Csv {
        out.rows(&table)?;
    }
    Ok(code)
}

fn perm_lemma(
    g: &GlobalOpts,
    out: &mut Output,
    d: usize,
    trials: usize,
    mu: Option<Vec<f64>>,
) -> Result<i32> {
    let spectra: Vec<SpectrumVector> = match mu {
        Some(v) => vec![SpectrumVector::new(v)?],
        None => {
            let cfg = SearchConfig {
                d,
                seed: g.seed,
                ..SearchConfig::new(Target::Commutative)
            };
            (0..trials as u64)
                .map(|t| match search::random_instance(&cfg, t) {
                    Instance::Commutative { mu, .. } => mu,
                    _ => unreachable!("commutative instances carry a spectrum"),
                })
                .collect()
        }
    };
    let mut rows = Vec::new();
    for (t, mu) in spectra.iter().enumerate() {
        let s = permlemma::sweep_commutative(mu)?;
        let violations = if s.worst_slack < -g.tol {
            s.violations.max(1)
        } else {
            0
        };
        rows.push(SweepRow {
            trial: t,
            d: s.d,
            mu: mu.values().to_vec(),
            count: s.count,
            violations,
            worst_slack: s.worst_slack,
            arg_worst: s.arg_worst.to_one_based(),
        });
    }
    match out.format {
        Format::Ndjson => out.rows(&rows)?,
        Format::Csv => out.rows(&rows.iter().map(SweepRow::joined).collect::<Vec<_>>())?,
    }
    let bad: usize = rows.iter().map(|r| r.violations).sum();
    if bad > 0 {
        eprintln!("violation of proven statement commutative: {bad} permutations");
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn drury_check(
    g: &GlobalOpts,
    out: &mut Output,
    file: Option<&PathBuf>,
    d: usize,
    trials: usize,
) -> Result<i32> {
    let inputs: Vec<ComplexMatrix> = match file {
        Some(path) => vec![read_matrix(path)?],
        None => {
            let mut r = rng(g.seed, 0);
            (0..trials)
                .map(|_| matcore::random_gaussian(d, d, &mut r))
                .collect()
        }
    };
    let reports: Vec<Result<InequalityReport>> = inputs
        .par_iter()
        .map(permlemma::drury_numeric_check)
        .collect();
    let mut rows = Vec::with_capacity(reports.len());
    for (t, r) in reports.into_iter().enumerate() {
        rows.push(ReportRow::new(t, &r?, g.tol, true));
    }
    out.rows(&rows)?;
    summarize(&rows)
}

fn im_approx(
    out: &mut Output,
    theta: f64,
    s_list: &[f64],
    grid: Grid,
    quad_tol: f64,
    levels: usize,
) -> Result<i32> {
    let params = IMParams {
        theta,
        s: 1.0,
        quad_tol,
        grid,
    };
    params.validate()?;
    let table = imfunc::sup_error_table(&params, s_list)?;
    let first = table.first().map_or(f64::NAN, |r| r.sup_error);
    let rows: Vec<SupErrorRow> = table
        .iter()
        .map(|r| SupErrorRow {
            s: r.s,
            sup_error: r.sup_error,
            argmax: r.argmax,
            ratio: r.sup_error / first,
        })
        .collect();
    out.rows(&rows)?;
    let pairs = imfunc::im_pair_check(theta, levels, 1e-13)?;
    eprintln!(
        "h(0) = {:.12}, min g′(t₁)+g′(t₂) = {:.3e} over {levels} levels",
        imfunc::h(0.0, theta, quad_tol)?,
        pairs.min_derivative_sum
    );
    if !pairs.holds {
        eprintln!("violation of proven statement: curvature pair sum not positive");
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

fn run_search(g: &GlobalOpts, out: &mut Output, cfg: SearchConfig) -> Result<i32> {
    let res = search::run_search(&cfg)?;
    out.record(&res)?;
    eprintln!(
        "{}: min slack {:.3e} at trial {}, {} violations over {} trials",
        res.target, res.min_slack, res.trial_index, res.violations, res.trials
    );
    if res.violations == 0 {
        return Ok(EXIT_OK);
    }
    if cfg.target.is_proven() {
        eprintln!("violation of proven statement {}", res.target);
        Ok(EXIT_VIOLATION)
    } else {
        finding(&format!(
            "{} violated in {} trials; argmin in the output record (seed {})",
            res.target, res.violations, g.seed
        ));
        Ok(EXIT_OK)
    }
}

fn run_selftest(g: &GlobalOpts, out: &mut Output, only: Option<Vec<u8>>) -> Result<i32> {
    let ids = only.unwrap_or_else(|| (1..=10).collect());
    let mut outcomes = Vec::new();
    for id in ids {
        let o = selftest::run_criterion(id, g.seed);
        eprintln!("{o}");
        if o.finding {
            finding(&o.detail);
        }
        outcomes.push(o);
    }
    out.rows(&outcomes)?;
    Ok(if outcomes.iter().all(|o| o.passed || o.finding) {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn dispatch(cli: Cli) -> Result<i32> {
    let g = &cli.global;
    if !(g.tol >= 0.0 && g.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "--tol must be a non-negative number, got {}",
            g.tol
        )));
    }
    let default_format = match cli.command {
        Command::ImApprox { .. } => Format::Csv,
        _ => Format::Ndjson,
    };
    let writer: Box<dyn Write> = match &g.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut out = Output {
        writer,
        format: g.format.unwrap_or(default_format),
    };
    let code = match cli.command {
        Command::VerifyConjecture { dims, trials } => verify_conjecture(g, &mut out, dims, trials),
        Command::SpecialCase {
            ref file,
            d,
            trials,
        } => special_case(g, &mut out, file.as_ref(), d, trials),
        Command::PermLemma { d, trials, ref mu } => perm_lemma(g, &mut out, d, trials, mu.clone()),
        Command::DruryCheck {
            ref file,
            d,
            trials,
        } => drury_check(g, &mut out, file.as_ref(), d, trials),
        Command::ImApprox {
            theta,
            ref s_list,
            grid,
            quad_tol,
            levels,
        } => im_approx(&mut out, theta, s_list, grid, quad_tol, levels),
        Command::Search {
            target,
            dims,
            d,
            trials,
            steps,
            step_scale,
        } => {
            let cfg = SearchConfig {
                target,
                dims,
                d,
                trials,
                local_steps: steps,
                step_scale,
                seed: g.seed,
                tol: g.tol,
            };
            run_search(g, &mut out, cfg)
        }
        Command::Selftest { ref only } => run_selftest(g, &mut out, only.clone()),
    }?;
    out.writer.flush()?;
    Ok(code)
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match cli.global.jobs {
        Some(0) => {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(code) => code,
        Err(Error::StepFailed { step, slack }) => {
            eprintln!("violation of proven statement: step ({step}) slack {slack:.3e}");
            EXIT_VIOLATION
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_subcommand() {
        for argv in [
            vec![
                "negmono",
                "verify-conjecture",
                "--dims",
                "2x3x3",
                "--trials",
                "5",
            ],
            vec!["negmono", "special-case", "--d", "4"],
            vec!["negmono", "perm-lemma", "--mu", "0.5,0.3,0.2"],
            vec!["negmono", "drury-check", "--d", "2", "--trials", "3"],
            vec![
                "negmono",
                "im-approx",
                "--grid",
                "-1:1:11",
                "--s-list",
                "1,4",
            ],
            vec![
                "negmono", "search", "--target", "ineqid2", "--d", "2", "--trials", "4", "--seed",
                "9",
            ],
            vec!["negmono", "--jobs", "2", "selftest", "--only", "5,9"],
        ] {
            Cli::try_parse_from(&argv).unwrap_or_else(|e| panic!("{argv:?}: {e}"));
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["negmono", "search", "--target", "ineq9"]), EXIT_USAGE);
        assert_eq!(
            run(["negmono", "verify-conjecture", "--dims", "2x0x2"]),
            EXIT_USAGE
        );
        assert_eq!(run(["negmono", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            run(["negmono", "--jobs", "0", "selftest", "--only", "5"]),
            EXIT_USAGE
        );
        assert_eq!(
            run(["negmono", "--tol=-1", "selftest", "--only", "5"]),
            EXIT_USAGE
        );
    }

    fn row(name: &str, slack: f64, proven: bool) -> ReportRow {
        ReportRow {
            trial: 0,
            name: name.into(),
            lhs: 0.0,
            rhs: slack,
            slack,
            holds: slack >= -TAU_CHECK,
            proven,
        }
    }

    #[test]
    fn exit_code_policy() {
        assert_eq!(
            summarize(&[row("a", 0.1, true), row("b", 0.0, false)]).unwrap(),
            EXIT_OK
        );
        assert_eq!(
            summarize(&[row("conjecture", -1.0, false)]).unwrap(),
            EXIT_OK
        );
        assert_eq!(
            summarize(&[row("lemma", -1.0, true)]).unwrap(),
            EXIT_VIOLATION
        );
    }

    #[test]
    fn seed_flag_parses() {
        let cli = Cli::try_parse_from(["negmono", "search", "--seed", "42"]).unwrap();
        assert_eq!(cli.global.seed, 42);
        let cli = Cli::try_parse_from(["negmono", "im-approx"]).unwrap();
        assert!(
            matches!(cli.command, Command::ImApprox { ref s_list, .. } if s_list == &[1.0, 10.0, 100.0])
        );
    }
}
