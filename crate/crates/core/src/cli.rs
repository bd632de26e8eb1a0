//! `maxsample` command-line interface.
//!
//! Reports are `key=value` lines; `--human` switches to aligned columns.
//! Exit codes: 0 ok, 2 parse error, 3 budget overflow, 4 domain error,
//! 5 verification failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{
    exponent_ept, exponent_hirsch1, exponent_hirsch2, exponent_ours_eksat,
    exponent_ours_ksat_delta2, table1, ExponentReport, DEFAULT_ALPHA, TABLE_TOLERANCE,
};
use crate::error::Error;
use crate::formats::{self, SourceKind};
use crate::generate::random_ekcnf;
use crate::instance::CspInstance;
use crate::oracle::{Oracle, VerificationReport, DEFAULT_MAX_VARS};
use crate::sampler::{solve, solve_ksat, SamplerConfig, SamplerResult, DEFAULT_FAIL_PROB};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "maxsample",
    version,
    about = "Uniform-sampling MAX-CSP / MAX-k-SAT approximation"
)]
pub struct Cli {
    /// Aligned columns instead of key=value lines.
    #[arg(long, global = true)]
    pub human: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample assignments until the failure-probability budget is spent.
    Solve(SolveArgs),
    /// Runtime exponent of one algorithm.
    Exponent(ExponentArgs),
    /// Exponent comparison table for MAX-E-k-SAT, k = 3..6.
    Table {
        /// Compare against the embedded reference values; exit 5 on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Check the near-optimal counting bound by brute force.
    Verify(VerifyArgs),
    /// Emit a random E-k-CNF in DIMACS format.
    Gen(GenArgs),
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub eps: f64,
    /// Lower bound on the optimum; makes the target (1 - eps) * w*.
    #[arg(long)]
    pub wbar: Option<f64>,
    /// Treat the input as MAX-k-SAT and derive wbar from clause lengths.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "fail", default_value_t = DEFAULT_FAIL_PROB)]
    pub fail: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-iters")]
    pub max_iters: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub parallelism: usize,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, clap::Args)]
pub struct ExponentArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub wbar: Option<f64>,
    #[arg(long = "max-n", default_value_t = DEFAULT_MAX_VARS)]
    pub max_n: usize,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Cnf,
    Wcnf,
    Csp,
}

impl From<FormatArg> for SourceKind {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Cnf => SourceKind::Cnf,
            FormatArg::Wcnf => SourceKind::Wcnf,
            FormatArg::Csp => SourceKind::Csp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ours,
    #[value(name = "ours-delta2")]
    OursDelta2,
    Hirsch1,
    Hirsch2,
    Ept,
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Format { .. } | Error::Unsupported(_) => EXIT_PARSE,
            Error::BudgetOverflow { .. } => EXIT_BUDGET,
            Error::Domain(_)
            | Error::Size { .. }
            | Error::Dimension { .. }
            | Error::IndexOutOfRange { .. } => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs one invocation and returns its exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut report = Report::new(cli.human);
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args, &mut report),
        Command::Exponent(args) => cmd_exponent(args, &mut report),
        Command::Table { check } => cmd_table(*check, &mut report),
        Command::Verify(args) => cmd_verify(args, &mut report),
        Command::Gen(args) => cmd_gen(args, &mut report),
    };
    let _ = out.write_all(report.render().as_bytes());
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Line-oriented output buffer.
struct Report {
    human: bool,
    lines: Vec<Line>,
}

enum Line {
    Pair(String, String),
    Raw(String),
}

impl Report {
    fn new(human: bool) -> Self {
        Report {
            human,
            lines: Vec::new(),
        }
    }

    fn kv(&mut self, key: &str, value: impl ToString) {
        self.lines
            .push(Line::Pair(key.to_string(), value.to_string()));
    }

    fn raw(&mut self, line: impl Into<String>) {
        self.lines.push(Line::Raw(line.into()));
    }

    fn render(&self) -> String {
        let width = self
            .lines
            .iter()
            .filter_map(|l| match l {
                Line::Pair(k, _) => Some(k.len()),
                Line::Raw(_) => None,
            })
            .max()
            .unwrap_or(0);
        let mut s = String::new();
        for line in &self.lines {
            match line {
                Line::Pair(k, v) if self.human => s.push_str(&format!("{k:<width$}  {v}\n")),
                Line::Pair(k, v) => s.push_str(&format!("{k}={v}\n")),
                Line::Raw(r) => {
                    s.push_str(r);
                    s.push('\n');
                }
            }
        }
        s
    }
}

fn real(x: f64) -> String {
    format!("{x:.9}")
}

fn domain(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_DOMAIN,
        message: msg.into(),
    }
}

fn load(path: &PathBuf, format: Option<FormatArg>) -> Result<CspInstance<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", path.display()),
    })?;
    let (inst, diag) = formats::parse(&text, format.map(SourceKind::from))?;
    for (line, msg) in diag.warnings {
        eprintln!("warning: line {line}: {msg}");
    }
    Ok(inst)
}

fn cmd_solve(args: &SolveArgs, report: &mut Report) -> CmdResult {
    let inst = load(&args.file, args.format)?;
    let mut cfg = SamplerConfig::new(args.eps)
        .with_fail_prob(args.fail)
        .with_seed(args.seed)
        .with_parallelism(args.parallelism);
    cfg.w_bar = args.wbar;
    cfg.max_iterations = args.max_iters;
    let result = match args.k {
        Some(k) => solve_ksat(&inst, k, &cfg)?,
        None => solve(&inst, &cfg)?,
    };
    let w_bar = match args.k {
        Some(k) => Some(crate::sampler::ksat_w_bar(&inst, k)?),
        None => args.wbar,
    };
    render_solve(report, &inst, args.eps, w_bar, &result);
    Ok(EXIT_OK)
}

fn render_solve(
    report: &mut Report,
    inst: &CspInstance<f64>,
    eps: f64,
    w_bar: Option<f64>,
    r: &SamplerResult<f64>,
) {
    report.kv("n", inst.num_vars());
    report.kv("m", inst.num_constraints());
    report.kv("w", real(inst.total_weight()));
    report.kv("l", real(inst.weighted_length()));
    report.kv("eps", real(eps));
    report.kv("w_bar", w_bar.map(real).unwrap_or_else(|| "none".into()));
    report.kv("eps_eff", real(r.effective_epsilon));
    report.kv("log2_count", real(r.log2_count));
    report.kv("log2_budget", real(r.log2_budget));
    report.kv("iterations_budget", r.iterations_budget);
    report.kv("iterations", r.iterations_used);
    report.kv("best_index", r.best_index);
    report.kv("best_weight", real(r.best_weight));
    report.kv("target", r.target_kind.name());
    report.kv("fail_bound", format!("{:.6e}", r.achieved_fail_bound));
    report.kv("seed", r.seed);
    report.kv("assignment", &r.best_assignment);
    for w in &r.warnings {
        report.kv("warning", w);
    }
}

fn cmd_exponent(args: &ExponentArgs, report: &mut Report) -> CmdResult {
    let need_k = || {
        args.k
            .ok_or_else(|| domain("--k is required for this method"))
    };
    let rep: ExponentReport<f64> = match args.method {
        MethodArg::Ours => exponent_ours_eksat(need_k()?, args.eps)?,
        MethodArg::OursDelta2 => exponent_ours_ksat_delta2(need_k()?, args.eps)?,
        MethodArg::Hirsch1 => exponent_hirsch1(need_k()?, args.eps)?,
        MethodArg::Hirsch2 => exponent_hirsch2(need_k()?, args.eps)?,
        MethodArg::Ept => exponent_ept(args.eps, args.alpha)?,
    };
    report.kv("method", rep.method);
    if let Some(k) = rep.k {
        report.kv("k", k);
    }
    report.kv("eps", rep.epsilon);
    if let Some(a) = rep.alpha {
        report.kv("alpha", a);
    }
    if let Some(d) = rep.delta_star {
        report.kv("delta_star", format!("{d:.10}"));
    }
    report.kv("exponent", format!("{:.10}", rep.exponent));
    report.kv("base", format!("(2 - {:.10})^n", rep.base_gap()));
    Ok(EXIT_OK)
}

fn cmd_table(check: bool, report: &mut Report) -> CmdResult {
    let rows = table1()?;
    if report.human {
        report.raw(format!(
            "{:>2}  {:>9}  {:>9}  {:>9}  {:>10}",
            "k", "eps", "hirsch2", "ours", "delta*"
        ));
    }
    let mut mismatches = 0;
    for row in &rows {
        if report.human {
            report.raw(format!(
                "{:>2}  {:>9}  {:.7}  {:.7}  {:.8}",
                row.k, row.epsilon, row.hirsch2, row.ours, row.delta_star
            ));
        } else {
            report.raw(format!(
                "k={} eps={} hirsch2={:.7} ours={:.7} delta_star={:.8}",
                row.k, row.epsilon, row.hirsch2, row.ours, row.delta_star
            ));
        }
        if check && !row.matches_reference() {
            mismatches += 1;
            report.raw(format!(
                "mismatch k={} eps={} expected hirsch2={:.7} ours={:.7}",
                row.k, row.epsilon, row.reference_hirsch2, row.reference_ours
            ));
        }
    }
    report.kv("rows", rows.len());
    if check {
        report.kv("tolerance", format!("{TABLE_TOLERANCE:e}"));
        report.kv("check", if mismatches == 0 { "pass" } else { "fail" });
        if mismatches > 0 {
            return Ok(EXIT_VERIFY);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, report: &mut Report) -> CmdResult {
    let inst = load(&args.file, args.format)?;
    let oracle = Oracle::default().with_max_vars(args.max_n);
    let rep = oracle.verify_theorem_lb(&inst, args.eps, args.wbar)?;
    render_verify(report, &rep);
    Ok(if rep.all_pass { EXIT_OK } else { EXIT_VERIFY })
}

fn render_verify(report: &mut Report, rep: &VerificationReport<f64>) {
    report.kv("n", rep.n);
    report.kv("m", rep.m);
    report.kv("eps", real(rep.epsilon));
    report.kv("eps_eff", real(rep.effective_epsilon));
    report.kv("w_star", real(rep.w_star));
    report.kv("argmax", &rep.argmax);
    report.kv("d_exact", rep.d_exact);
    for c in &rep.per_delta_checks {
        report.raw(format!(
            "delta={:.9} threshold={:.9} s_size={} r={} sigma_count={} pass={} members_pass={}",
            c.delta, c.threshold, c.s_size, c.r, c.sigma_count, c.pass, c.members_pass
        ));
    }
    report.kv("all_pass", rep.all_pass);
}

fn cmd_gen(args: &GenArgs, report: &mut Report) -> CmdResult {
    let inst: CspInstance<f64> = random_ekcnf(args.n, args.m, args.k, args.seed)?;
    let text = formats::serialize(&inst, SourceKind::Cnf)?;
    report.raw(text.trim_end());
    Ok(EXIT_OK)
}
