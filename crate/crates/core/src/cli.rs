//! Command-line front end. The binary only forwards to [`main_from_env`].

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    best_lower_bound, pick_promising_m, sparse_count, upper_bound, CertificateDoc, DensitySchedule,
    SparseCountConfig, TrialOptions,
};
use crate::comb::{min_density_fstar, LogNum, SparseFamily};
use crate::dimacs;
use crate::error::{Error, Result};
use crate::gf2hash::Assignment;
use crate::oracle::{
    Backend, CountingProblem, ExternalSolver, Search, SurvivorOracle, DEFAULT_XOR_CHUNK,
};
use crate::tables::{brute_force_count_with, encode_to_cnf, ContingencyTableSpec, CountLimits};

/// Exit status when some certificate could not be issued because trials were unknown.
pub const EXIT_INCONCLUSIVE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "xorcount",
    version,
    about = "Certified bounds on solution counts via sparse parity constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the collision bound epsilon(n, m, q, f) and the variance bound v(q).
    Epsilon {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Decimal or `2^k`.
        #[arg(long)]
        q: String,
        #[arg(long)]
        f: f64,
    },
    /// Minimum density meeting the shattering condition at q = 2^(m+c).
    Fstar {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        c: u32,
        #[arg(long, default_value_t = 2.25)]
        delta: f64,
        /// Write the certificate as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Lower bound, upper bound or SPARSE-COUNT estimate for one input.
    Bound(BoundArgs),
    /// Lower and upper bounds over a list of densities, as CSV.
    Sweep(SweepArgs),
    /// Exact count of a contingency table spec.
    Table {
        /// Table spec file or `synth:<n>`.
        spec: String,
        /// Search limits for large, tightly constrained tables.
        #[arg(long)]
        relaxed: bool,
        /// Also write the CNF encoding here.
        #[arg(long)]
        emit_cnf: Option<PathBuf>,
    },
    /// Reference DPLL solver speaking the standard solution-line protocol.
    Solve { input: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lb,
    Ub,
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Auto,
    Cnf,
    Table,
    Explicit,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// CNF file, table spec, explicit set (one bit string per line), or `synth:<n>`.
    pub input: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: InputFormat,
    /// Count models projected onto variables 1..=N of a CNF.
    #[arg(long)]
    pub project: Option<usize>,
    /// Solver command with an `{in}` placeholder; without it an in-process backend is used.
    #[arg(long, env = "XORCOUNT_SOLVER")]
    pub solver: Option<String>,
    /// Wall-clock limit per solver call, in seconds.
    #[arg(long)]
    pub budget_s: Option<f64>,
    /// Pass hash rows to the solver as x-lines.
    #[arg(long)]
    pub native_xor: bool,
    #[arg(long, default_value_t = DEFAULT_XOR_CHUNK)]
    pub chunk: usize,
    /// Worker threads for trials.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "lb")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0.5)]
    pub f: f64,
    #[arg(long)]
    pub m: Option<usize>,
    /// Trials per estimate (lower bounds).
    #[arg(long = "T", default_value_t = 100)]
    pub trials: usize,
    /// Failure probability for upper bounds and SPARSE-COUNT.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Fixed success threshold c; the observed rate is used when absent.
    #[arg(long)]
    pub c_threshold: Option<f64>,
    #[arg(long)]
    pub bonferroni: bool,
    /// Trials per coarse estimate when choosing m.
    #[arg(long = "coarse-T", default_value_t = 15)]
    pub coarse_trials: usize,
    #[arg(long, default_value_t = 0.04)]
    pub alpha: f64,
    /// Drop the ln n factor from the SPARSE-COUNT trial count.
    #[arg(long)]
    pub drop_log_n: bool,
    /// SPARSE-COUNT uses the minimum shattering density per level instead of --f.
    #[arg(long)]
    pub fstar_schedule: bool,
    /// Write the run report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated densities.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
    pub f_list: Vec<f64>,
    #[arg(long = "T", default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long)]
    pub c_threshold: Option<f64>,
    #[arg(long = "coarse-T", default_value_t = 15)]
    pub coarse_trials: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Directory for per-point certificates; defaults to `<csv>.certs`.
    #[arg(long)]
    pub cert_dir: Option<PathBuf>,
}

/// Everything a bound run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub seed: u64,
    pub config: Value,
    pub problem: String,
    pub certificates: Vec<CertificateDoc>,
    pub timing_s: BTreeMap<String, f64>,
    pub solver: SolverSummary,
    /// `ok` or `inconclusive`.
    pub status: String,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolverSummary {
    pub backend: String,
    pub calls: usize,
    pub unknown: usize,
    pub total_solver_time_s: f64,
}

impl SolverSummary {
    fn absorb(&mut self, doc: &CertificateDoc) {
        self.calls += doc.trial_outcomes.len();
        self.unknown += doc
            .trial_outcomes
            .iter()
            .filter(|o| o.answer == crate::oracle::Answer::Unknown)
            .count();
        self.total_solver_time_s += doc
            .trial_outcomes
            .iter()
            .map(|o| o.solver_time_s)
            .sum::<f64>();
    }
}

fn parse_q(s: &str) -> Result<BigUint> {
    let s = s.trim();
    if let Some(k) = s.strip_prefix("2^") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::param(format!("bad exponent in {s:?}")))?;
        return Ok(BigUint::one() << k);
    }
    BigUint::from_str(s)
        .map_err(|_| Error::param(format!("q must be a positive integer or 2^k, got {s:?}")))
}

fn describe_lognum(x: LogNum) -> String {
    let lin = x.to_f64();
    let lin = if lin.is_finite() && lin > 1e-300 {
        format!("{lin:.6e}")
    } else {
        "unrepresentable".into()
    };
    format!("ln = {:.9}, log2 = {:.9}, value = {lin}", x.ln(), x.log2())
}

/// Parses an explicit set: one `0`/`1` string per line, `#` comments.
pub fn parse_explicit_set(text: &str) -> Result<CountingProblem> {
    let mut set = Vec::new();
    let mut width = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let x = Assignment::parse_bits(line).ok_or_else(|| Error::Parse {
            line: k + 1,
            msg: format!("expected a 0/1 string, got {line:?}"),
        })?;
        match width {
            None => width = Some(x.width()),
            Some(w) if w != x.width() => {
                return Err(Error::Parse {
                    line: k + 1,
                    msg: format!("width {} differs from {w}", x.width()),
                })
            }
            _ => {}
        }
        set.push(x);
    }
    let n = width.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "explicit set is empty; its width is unknown".into(),
    })?;
    CountingProblem::explicit(n, set)
}

fn synth_spec(input: &str) -> Result<Option<ContingencyTableSpec>> {
    match input.strip_prefix("synth:") {
        Some(k) => {
            let n: usize = k
                .parse()
                .map_err(|_| Error::param(format!("bad synth size {k:?}")))?;
            Ok(Some(ContingencyTableSpec::synth(n)?))
        }
        None => Ok(None),
    }
}

/// Loads the counting problem named on the command line.
pub fn load_problem(args: &ProblemArgs) -> Result<CountingProblem> {
    if let Some(spec) = synth_spec(&args.input)? {
        return CountingProblem::table(spec);
    }
    let path = Path::new(&args.input);
    let text = fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
    let format = match args.format {
        InputFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("cnf" | "dimacs") => InputFormat::Cnf,
            Some("table" | "tbl") => InputFormat::Table,
            _ => InputFormat::Explicit,
        },
        f => f,
    };
    match format {
        InputFormat::Cnf => {
            let formula = dimacs::parse(&text)?;
            let n = args.project.unwrap_or(formula.num_vars as usize);
            CountingProblem::cnf_projected(formula, n)
        }
        InputFormat::Table => CountingProblem::table(ContingencyTableSpec::parse(&text)?),
        InputFormat::Explicit => parse_explicit_set(&text),
        InputFormat::Auto => unreachable!(),
    }
}

fn backend_for(args: &ProblemArgs) -> Result<Backend> {
    Ok(match &args.solver {
        None => Backend::Auto,
        Some(cmd) if cmd.trim().is_empty() => Backend::Auto,
        Some(cmd) => Backend::External(
            ExternalSolver::from_template(cmd)?
                .with_native_xor(args.native_xor)
                .with_chunk(args.chunk),
        ),
    })
}

fn trial_options(args: &ProblemArgs) -> Result<TrialOptions> {
    let budget = match args.budget_s {
        None => None,
        Some(s) if s > 0.0 && s.is_finite() => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(Error::param(format!("budget must be positive, got {s}"))),
    };
    Ok(TrialOptions {
        budget,
        jobs: args.jobs,
    })
}

struct Session {
    problem: CountingProblem,
    oracle: Box<dyn SurvivorOracle>,
    opts: TrialOptions,
    setup_s: f64,
}

fn open_session(args: &ProblemArgs) -> Result<Session> {
    let start = Instant::now();
    let problem = load_problem(args)?;
    let oracle = backend_for(args)?.build(&problem)?;
    Ok(Session {
        problem,
        oracle,
        opts: trial_options(args)?,
        setup_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs one bound pipeline. `Err(Inconclusive)` is turned into a report by the caller.
pub fn run_bound(args: &BoundArgs, command: Vec<String>) -> Result<RunReport> {
    let s = open_session(&args.problem)?;
    let n = s.problem.n();
    let seed = args.problem.seed;
    let mut timing = BTreeMap::new();
    timing.insert("setup".to_string(), s.setup_s);
    let mut report = RunReport {
        command,
        seed,
        config: json!({
            "mode": args.mode,
            "f": args.f,
            "m": args.m,
            "T": args.trials,
            "delta": args.delta,
            "kappa": args.kappa,
            "c_threshold": args.c_threshold,
            "bonferroni": args.bonferroni,
            "alpha": args.alpha,
            "drop_log_n": args.drop_log_n,
            "fstar_schedule": args.fstar_schedule,
            "budget_s": args.problem.budget_s,
            "native_xor": args.problem.native_xor,
            "chunk": args.problem.chunk,
        }),
        problem: s.problem.describe(),
        certificates: Vec::new(),
        timing_s: timing,
        solver: SolverSummary {
            backend: s.oracle.name().to_string(),
            ..Default::default()
        },
        status: "ok".into(),
        diagnostics: Vec::new(),
    };
    let phase = Instant::now();
    let outcome: Result<()> = (|| {
        match args.mode {
            Mode::Lb => {
                let range = match args.m {
                    Some(m) => m..=m,
                    None => {
                        let pick = pick_promising_m(
                            s.oracle.as_ref(),
                            args.f,
                            args.coarse_trials,
                            seed,
                            &s.opts,
                        )?;
                        report
                            .timing_s
                            .insert("pick_m".into(), phase.elapsed().as_secs_f64());
                        report
                            .diagnostics
                            .push(format!("coarse sweep picked m = {pick}"));
                        pick.saturating_sub(2).max(1)..=(pick + 2).min(n)
                    }
                };
                let cert = best_lower_bound(
                    s.oracle.as_ref(),
                    args.f,
                    range,
                    args.trials,
                    args.kappa,
                    args.c_threshold,
                    seed,
                    args.bonferroni,
                    &s.opts,
                )?;
                report.certificates.push(CertificateDoc::from(&cert));
            }
            Mode::Ub => {
                let m = match args.m {
                    Some(m) => m,
                    None => {
                        let pick = pick_promising_m(
                            s.oracle.as_ref(),
                            args.f,
                            args.coarse_trials,
                            seed,
                            &s.opts,
                        )?;
                        report
                            .timing_s
                            .insert("pick_m".into(), phase.elapsed().as_secs_f64());
                        report
                            .diagnostics
                            .push(format!("coarse sweep picked m = {pick}"));
                        (pick + 2).min(n)
                    }
                };
                let cert = upper_bound(s.oracle.as_ref(), m, args.f, args.delta, seed, &s.opts)?;
                report.certificates.push(CertificateDoc::from(&cert));
            }
            Mode::Count => {
                let schedule = if args.fstar_schedule {
                    DensitySchedule::Shattering { c: 2, delta: 2.25 }
                } else {
                    DensitySchedule::Constant(args.f)
                };
                let mut cfg = SparseCountConfig::new(args.delta, args.alpha, schedule);
                cfg.drop_log_n = args.drop_log_n;
                let r = sparse_count(s.oracle.as_ref(), &cfg, seed, &s.opts)?;
                if r.exhausted {
                    report
                        .diagnostics
                        .push("no level broke; estimate is n".into());
                }
                report
                    .certificates
                    .push(CertificateDoc::from_count(&r, n, args.delta, args.alpha));
            }
        }
        Ok(())
    })();
    report
        .timing_s
        .insert("bound".into(), phase.elapsed().as_secs_f64());
    for doc in &report.certificates {
        report.solver.absorb(doc);
    }
    match outcome {
        Ok(()) => Ok(report),
        Err(Error::Inconclusive { unknown, trials }) => {
            report.status = "inconclusive".into();
            report.solver.unknown += unknown;
            report.diagnostics.push(format!(
                "{unknown} of {trials} trials returned unknown; no certificate issued"
            ));
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

/// One CSV line of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub f: f64,
    pub lb_log2: Option<f64>,
    pub ub_log2: Option<f64>,
    pub wall_time_s: f64,
    pub certificates_path: String,
}

/// Lower and upper bound at each density; a failing point leaves blanks and the sweep continues.
pub fn run_sweep(args: &SweepArgs) -> Result<(Vec<SweepRow>, Vec<String>)> {
    let s = open_session(&args.problem)?;
    let n = s.problem.n();
    let seed = args.problem.seed;
    let cert_dir = args
        .cert_dir
        .clone()
        .or_else(|| args.csv.as_ref().map(|p| p.with_extension("certs")));
    if let Some(d) = &cert_dir {
        fs::create_dir_all(d).map_err(|e| Error::io_at(d, e))?;
    }
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for &f in &args.f_list {
        let start = Instant::now();
        let point: Result<Vec<CertificateDoc>> = (|| {
            let pick = pick_promising_m(s.oracle.as_ref(), f, args.coarse_trials, seed, &s.opts)?;
            let range = pick.saturating_sub(2).max(1)..=(pick + 2).min(n);
            let lb = best_lower_bound(
                s.oracle.as_ref(),
                f,
                range,
                args.trials,
                args.kappa,
                args.c_threshold,
                seed,
                false,
                &s.opts,
            )?;
            let ub = upper_bound(
                s.oracle.as_ref(),
                (pick + 2).min(n),
                f,
                args.delta,
                seed,
                &s.opts,
            )?;
            Ok(vec![CertificateDoc::from(&lb), CertificateDoc::from(&ub)])
        })();
        let wall = start.elapsed().as_secs_f64();
        let mut row = SweepRow {
            f,
            lb_log2: None,
            ub_log2: None,
            wall_time_s: wall,
            certificates_path: String::new(),
        };
        match point {
            Ok(docs) => {
                row.lb_log2 = docs[0].bound_log2;
                row.ub_log2 = docs[1].bound_log2;
                if let Some(d) = &cert_dir {
                    let path = d.join(format!("f_{f:.4}.json"));
                    let body = serde_json::to_string_pretty(&docs)?;
                    fs::write(&path, body).map_err(|e| Error::io_at(&path, e))?;
                    row.certificates_path = path.display().to_string();
                }
            }
            Err(e) => problems.push(format!("f = {f}: {e}")),
        }
        rows.push(row);
    }
    Ok((rows, problems))
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(std::io::Error::other)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn print_report(r: &RunReport) {
    println!("problem: {}", r.problem);
    println!("backend: {}, seed: {}", r.solver.backend, r.seed);
    for d in &r.diagnostics {
        println!("note: {d}");
    }
    for c in &r.certificates {
        match (c.bound_log2, c.bound_ln) {
            (Some(b2), Some(be)) => println!(
                "{} bound: log2 = {b2:.4}, ln = {be:.4} (m = {}, f = {}, T = {}, confidence = {:.6})",
                c.kind,
                c.m,
                c.f,
                c.trials,
                c.confidence.unwrap_or(f64::NAN)
            ),
            _ => println!(
                "{} bound: vacuous (m = {}, f = {}, T = {}, confidence = {:.6})",
                c.kind,
                c.m,
                c.f,
                c.trials,
                c.confidence.unwrap_or(f64::NAN)
            ),
        }
    }
    println!("status: {}", r.status);
}

fn solve_file(path: &Path) -> Result<u8> {
    let text = fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
    let formula = dimacs::parse(&text)?;
    let mut search = Search::new(&formula)?;
    let model = search.solve();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "c conflicts {}", search.conflicts)?;
    match model {
        Some(values) => {
            writeln!(out, "s SATISFIABLE")?;
            let mut line = String::from("v");
            for (v, &on) in values
                .iter()
                .enumerate()
                .skip(1)
                .take(formula.num_vars as usize)
            {
                let v = v as i64;
                line.push_str(&format!(" {}", if on { v } else { -v }));
            }
            line.push_str(" 0");
            writeln!(out, "{line}")?;
            Ok(10)
        }
        None => {
            writeln!(out, "s UNSATISFIABLE")?;
            Ok(20)
        }
    }
}

/// Runs a parsed command; the value is the process exit status.
pub fn run(cli: Cli, argv: Vec<String>) -> Result<u8> {
    match cli.command {
        Command::Epsilon { n, m, q, f } => {
            let q = parse_q(&q)?;
            let fam = SparseFamily::new(n, m, f)?;
            let eps = fam.epsilon(&q)?;
            println!(
                "epsilon(n={n}, m={m}, q={q}, f={f}): {}",
                describe_lognum(eps)
            );
            let v = fam.variance_bound(&q)?;
            println!(
                "v(q): {}{}",
                describe_lognum(v.value),
                if v.clamped { " (clamped at 0)" } else { "" }
            );
            Ok(0)
        }
        Command::Fstar {
            n,
            m,
            c,
            delta,
            json,
        } => {
            let q = BigUint::one() << (m + c as usize);
            let cert = min_density_fstar(n, m, &q, delta)?;
            println!(
                "f*(n={n}, m={m}, q=2^{}, delta={delta}) = {:.6} (bracket [{}, {:.6}])",
                m + c as usize,
                cert.f_star,
                cert.bracket_lo
                    .map(|x| format!("{x:.6}"))
                    .unwrap_or_else(|| "-".into()),
                cert.bracket_hi
            );
            println!("condition value: {}", describe_lognum(cert.condition_value));
            println!("threshold:       {}", describe_lognum(cert.threshold));
            for w in &cert.warnings {
                println!("warning: {w}");
            }
            if let Some(p) = json {
                fs::write(&p, serde_json::to_string_pretty(&cert)?)
                    .map_err(|e| Error::io_at(&p, e))?;
            }
            Ok(0)
        }
        Command::Bound(args) => {
            let report = run_bound(&args, argv)?;
            print_report(&report);
            if let Some(p) = &args.json {
                fs::write(p, serde_json::to_string_pretty(&report)?)
                    .map_err(|e| Error::io_at(p, e))?;
            }
            Ok(if report.status == "ok" {
                0
            } else {
                EXIT_INCONCLUSIVE
            })
        }
        Command::Sweep(args) => {
            let (rows, problems) = run_sweep(&args)?;
            let text = sweep_csv(&rows)?;
            match &args.csv {
                Some(p) => fs::write(p, &text).map_err(|e| Error::io_at(p, e))?,
                None => print!("{text}"),
            }
            for p in &problems {
                eprintln!("point failed: {p}");
            }
            Ok(if problems.is_empty() {
                0
            } else {
                EXIT_INCONCLUSIVE
            })
        }
        Command::Table {
            spec,
            relaxed,
            emit_cnf,
        } => {
            let spec = match synth_spec(&spec)? {
                Some(s) => s,
                None => {
                    let text = fs::read_to_string(&spec).map_err(|e| Error::io_at(&spec, e))?;
                    ContingencyTableSpec::parse(&text)?
                }
            };
            for w in spec.warnings() {
                println!("warning: {w}");
            }
            let limits = if relaxed {
                CountLimits::relaxed()
            } else {
                CountLimits::default()
            };
            let count = brute_force_count_with(&spec, &limits)?;
            let l = LogNum::from_biguint(&count);
            println!("tables: {count}");
            println!("log2 = {:.4}, ln = {:.4}", l.log2(), l.ln());
            let enc = encode_to_cnf(&spec)?;
            println!(
                "encoding: {} cell bits, {} variables, {} clauses",
                enc.encoding.num_cell_bits(),
                enc.formula.num_vars,
                enc.formula.clauses.len()
            );
            if let Some(p) = emit_cnf {
                fs::write(&p, dimacs::emit(&enc.formula, false)?)
                    .map_err(|e| Error::io_at(&p, e))?;
            }
            Ok(0)
        }
        Command::Solve { input } => solve_file(&input),
    }
}

/// Entry point of the `xorcount` binary.
pub fn main_from_env() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    // clap's own usage-error status (2) would read as "inconclusive"
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, argv) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn q_syntax() {
        assert_eq!(parse_q("2^10").unwrap(), BigUint::from(1024u32));
        assert_eq!(parse_q("77").unwrap(), BigUint::from(77u32));
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn explicit_set_file() {
        let p = parse_explicit_set("# pts\n0101\n0101\n1100\n").unwrap();
        assert_eq!(p.n(), 4);
        assert_eq!(p.solutions().unwrap().len(), 2);
        assert!(parse_explicit_set("01\n011\n").is_err());
        assert!(parse_explicit_set("01\n0x\n").is_err());
    }

    #[test]
    fn csv_columns() {
        let rows = [SweepRow {
            f: 0.5,
            lb_log2: Some(3.0),
            ub_log2: None,
            wall_time_s: 0.25,
            certificates_path: "a.json".into(),
        }];
        let text = sweep_csv(&rows).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "f,lb_log2,ub_log2,wall_time_s,certificates_path"
        );
        assert_eq!(text.lines().nth(1).unwrap(), "0.5,3.0,,0.25,a.json");
    }
}
