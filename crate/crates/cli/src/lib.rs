//! Experiment runner behind the `prax` binary.
//!
//! Every command writes a human-readable table to the given output and,
//! with `--report`, one JSON object per run to a file. Exit codes: 0 on a
//! completed run, 1 when a self-test check fails, 2 on input or
//! configuration errors, 3 when `--budget-seconds` runs out.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use prax::distributions::{max_len_1d, DirichletParams};
use prax::domains::{CnfFormula, DiophantineEq, FamilyKind, Nfa, SubsetSpec, SymmetricDifference, TwoDAutomaton};
use prax::engine::{check_constant, sample_count, PraxConfig, Problem, DEFAULT_C};
use prax::oracle::{brute_size_class_mass, printed_prob_3d, EnumerationBudget, ReferencePmf};
use prax::tractable::{max_len_2d, max_len_3d, prob_2d, prob_3d, LocallyTractable, TripleFamily3D, WordFamily2D};
use prax::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "prax", version, about = "Randomized approximate emptiness and universality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate emptiness: is the language's mass at most eps?
    Empty(RunArgs),
    /// Approximate universality: is the language's mass at least 1 - eps?
    Universal(RunArgs),
    /// Emptiness of an equation and of its twin with the constant negated.
    DiophPair(PairArgs),
    /// Recompute the fixed constants and formula checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InstanceArgs {
    /// NFA file or text; give it twice for the symmetric difference.
    #[arg(long, num_args = 1)]
    pub nfa: Vec<String>,
    /// DIMACS CNF file or text.
    #[arg(long)]
    pub cnf: Option<String>,
    /// Two-dimensional automaton file or text.
    #[arg(long = "2da")]
    pub twoda: Option<String>,
    /// Equation in x, y, z, or a file holding one.
    #[arg(long)]
    pub dioph: Option<String>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Dirichlet exponent of the length distribution.
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    /// Smallest length with positive probability.
    #[arg(long, default_value_t = 0)]
    pub d: u64,
    /// Seed of the first run; run r uses seed + r. In `dioph-pair` the
    /// second equation continues at seed + repeat.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate samples on all cores; verdicts do not change.
    #[arg(long)]
    pub parallel: bool,
    /// Write one JSON report per run to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Abort a run that takes longer than this.
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    /// Report zero seconds so that reruns are byte-identical.
    #[arg(long)]
    pub no_clock: bool,
    /// For triples, size the truncation from inverse tail 3/delta instead
    /// of 2/delta, so the 3D tail stays below delta = eps/2 for every t.
    #[arg(long)]
    pub strict_tail: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// word1d, word2d, triple3d, uniform-block or uniform-assignment;
    /// defaults to the instance's natural family.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1)]
    pub repeat: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Equation in x, y, z, or a file holding one.
    #[arg(long)]
    pub dioph: String,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Runs per equation.
    #[arg(long, default_value_t = 5)]
    pub repeat: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Sample constant to check.
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
    /// Check the uncorrected 3D size-class expression 3y^2 + 3y + T(m)^3
    /// instead of 3T(m)y^2 + 3T(m)^2 y + T(m)^3.
    #[arg(long)]
    pub printed_3d_formula: bool,
}

/// One run, as written to the report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub instance: String,
    pub problem: String,
    pub family: String,
    /// Absent for finite families.
    pub t: Option<f64>,
    pub d: Option<u64>,
    pub epsilon: f64,
    pub c: f64,
    pub n: u64,
    /// Maximum size of the truncation; absent for finite families.
    pub m: Option<u64>,
    pub seed: u64,
    /// Absent when the run was aborted.
    pub answer: Option<bool>,
    pub witness: Option<String>,
    pub samples: u64,
    pub none_outcomes: u64,
    pub seconds: f64,
    pub completed: bool,
    pub version: String,
}

/// Parses arguments and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Empty(args) => cmd_run(&args, Problem::Emptiness, out),
        Command::Universal(args) => cmd_run(&args, Problem::Universality, out),
        Command::DiophPair(args) => cmd_dioph_pair(&args, out),
        Command::Selftest(args) => cmd_selftest(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Budget) => {
            let _ = writeln!(err, "error: time budget exhausted; partial report written");
            EXIT_BUDGET
        }
        Err(CliError::Fatal(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

enum CliError {
    Budget,
    Fatal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Fatal(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Fatal(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Reads `arg` as a file when one exists at that path, else as the text
/// itself.
fn load(arg: &str) -> CliResult<(String, String)> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| CliError::Fatal(format!("{arg}: {e}")))?;
        Ok((text, arg.to_string()))
    } else {
        Ok((arg.to_string(), "<inline>".to_string()))
    }
}

fn parse_error(source: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Fatal(format!("{source}: {e}"))
}

fn load_equation(arg: &str) -> CliResult<DiophantineEq> {
    let (text, source) = load(arg)?;
    DiophantineEq::parse(text.trim()).map_err(|e| parse_error(&source, e))
}

/// The parsed instance and a one-line description of it.
fn load_instance(args: &InstanceArgs) -> CliResult<(SubsetSpec, String)> {
    if !args.nfa.is_empty() {
        let mut automata = Vec::new();
        let mut names = Vec::new();
        for arg in &args.nfa {
            let (text, source) = load(arg)?;
            automata.push(Nfa::parse(&text).map_err(|e| parse_error(&source, e))?);
            names.push(source);
        }
        return match automata.len() {
            1 => Ok((SubsetSpec::Nfa(automata.remove(0)), format!("nfa {}", names[0]))),
            2 => {
                let right = automata.pop().expect("two automata");
                let left = automata.pop().expect("two automata");
                let diff = SymmetricDifference::new(left, right)?;
                Ok((SubsetSpec::SymmetricDifference(diff), format!("nfa {} xor {}", names[0], names[1])))
            }
            _ => Err(CliError::Fatal("at most two --nfa instances".into())),
        };
    }
    if let Some(arg) = &args.cnf {
        let (text, source) = load(arg)?;
        let f = CnfFormula::parse(&text).map_err(|e| parse_error(&source, e))?;
        return Ok((SubsetSpec::Cnf(f), format!("cnf {source}")));
    }
    if let Some(arg) = &args.twoda {
        let (text, source) = load(arg)?;
        let a = TwoDAutomaton::parse(&text).map_err(|e| parse_error(&source, e))?;
        return Ok((SubsetSpec::TwoD(a), format!("2da {source}")));
    }
    if let Some(arg) = &args.dioph {
        let eq = load_equation(arg)?;
        let name = format!("dioph {eq}");
        return Ok((SubsetSpec::Diophantine(eq), name));
    }
    Err(CliError::Fatal("no instance given".into()))
}

fn problem_name(problem: Problem) -> &'static str {
    match problem {
        Problem::Emptiness => "emptiness",
        Problem::Universality => "universality",
    }
}

struct Experiment<'a> {
    spec: &'a SubsetSpec,
    instance: String,
    family: FamilyKind,
    problem: Problem,
    params: DirichletParams,
    epsilon: f64,
    common: &'a CommonArgs,
}

impl Experiment<'_> {
    fn config(&self, seed: u64) -> CliResult<PraxConfig> {
        let deadline = match self.common.budget_seconds {
            Some(s) if !(s >= 0.0 && s.is_finite()) => {
                return Err(CliError::Fatal(format!("budget must be a nonnegative number of seconds, got {s}")))
            }
            Some(s) => Some(Instant::now() + Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(PraxConfig::new(self.epsilon, seed)?.parallel(self.common.parallel).strict_tail(self.common.strict_tail).deadline(deadline))
    }

    fn base_report(&self, config: &PraxConfig) -> ExperimentReport {
        let finite = self.family.is_finite();
        ExperimentReport {
            instance: self.instance.clone(),
            problem: problem_name(self.problem).to_string(),
            family: self.family.to_string(),
            t: (!finite).then_some(self.params.t()),
            d: (!finite).then_some(self.params.d()),
            epsilon: self.epsilon,
            c: config.c,
            n: sample_count(config),
            m: None,
            seed: config.seed,
            answer: None,
            witness: None,
            samples: 0,
            none_outcomes: 0,
            seconds: 0.0,
            completed: false,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// One seeded run. Budget exhaustion yields a partial report.
    fn run_once(&self, seed: u64) -> CliResult<ExperimentReport> {
        let config = self.config(seed)?;
        let mut report = self.base_report(&config);
        report.m = self.max_len(&config)?;
        let started = Instant::now();
        let outcome = self.spec.decide(&mut config.source(), self.family, self.problem, &self.params, &config);
        let seconds = if self.common.no_clock { 0.0 } else { started.elapsed().as_secs_f64() };
        report.seconds = seconds;
        match outcome {
            Ok(decision) => {
                let v = decision.verdict;
                report.answer = Some(v.answer);
                report.witness = v.witness.as_ref().map(|w| self.spec.render(w));
                report.samples = v.samples_used;
                report.none_outcomes = v.none_count;
                report.completed = true;
                debug_assert_eq!(report.m, decision.max_len);
                debug_assert_eq!(report.n, decision.n);
            }
            Err(Error::BudgetExhausted { samples_used, none_count }) => {
                report.samples = samples_used;
                report.none_outcomes = none_count;
            }
            Err(e) => return Err(e.into()),
        }
        Ok(report)
    }

    fn max_len(&self, config: &PraxConfig) -> CliResult<Option<u64>> {
        let delta = config.truncation_delta();
        Ok(match self.family {
            FamilyKind::Word1D => Some(max_len_1d(&self.params, delta)?),
            FamilyKind::Word2D => Some(max_len_2d(&WordFamily2D::new(self.params, 1)?, delta)?),
            FamilyKind::Triple3D => {
                let family = TripleFamily3D::new(self.params).with_strict_tail(config.strict_tail);
                Some(family.max_len(delta)?)
            }
            FamilyKind::UniformBlock | FamilyKind::UniformAssignment => None,
        })
    }
}

struct ReportSink {
    file: Option<fs::File>,
}

impl ReportSink {
    fn open(path: Option<&Path>) -> CliResult<Self> {
        let file = match path {
            Some(p) => Some(fs::File::create(p).map_err(|e| CliError::Fatal(format!("{}: {e}", p.display())))?),
            None => None,
        };
        Ok(ReportSink { file })
    }

    fn write(&mut self, report: &ExperimentReport) -> CliResult<()> {
        if let Some(f) = &mut self.file {
            let line = serde_json::to_string(report).map_err(|e| CliError::Fatal(e.to_string()))?;
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".to_string())
}

fn write_header(out: &mut dyn Write, first: &ExperimentReport) -> std::io::Result<()> {
    writeln!(out, "instance: {}", first.instance)?;
    writeln!(
        out,
        "problem: {}  family: {}  t: {}  d: {}  eps: {}  c: {}  n: {}  M: {}",
        first.problem,
        first.family,
        opt(first.t),
        opt(first.d),
        first.epsilon,
        first.c,
        first.n,
        opt(first.m)
    )?;
    writeln!(out, "{:>8} {:>8} {:>10} {:>8} {:>10}  witness", "seed", "answer", "samples", "none", "seconds")
}

fn write_row(out: &mut dyn Write, r: &ExperimentReport) -> std::io::Result<()> {
    let answer = match r.answer {
        Some(true) => "True",
        Some(false) => "False",
        None => "aborted",
    };
    writeln!(
        out,
        "{:>8} {:>8} {:>10} {:>8} {:>10.3}  {}",
        r.seed,
        answer,
        r.samples,
        r.none_outcomes,
        r.seconds,
        r.witness.as_deref().unwrap_or("-")
    )
}

/// Runs `repeat` seeded repetitions, printing and recording each. Returns
/// the reports and whether a budget abort happened.
fn run_series(
    exp: &Experiment<'_>,
    first_seed: u64,
    repeat: u64,
    out: &mut dyn Write,
    sink: &mut ReportSink,
) -> CliResult<(Vec<ExperimentReport>, bool)> {
    let mut reports = Vec::new();
    for r in 0..repeat {
        let seed = first_seed.wrapping_add(r);
        let report = exp.run_once(seed)?;
        if r == 0 {
            write_header(out, &report)?;
        }
        write_row(out, &report)?;
        sink.write(&report)?;
        let aborted = !report.completed;
        reports.push(report);
        if aborted {
            return Ok((reports, true));
        }
    }
    Ok((reports, false))
}

fn cmd_run(args: &RunArgs, problem: Problem, out: &mut dyn Write) -> CliResult<i32> {
    let (spec, instance) = load_instance(&args.instance)?;
    let family = match &args.family {
        Some(name) => name.parse::<FamilyKind>()?,
        None => spec.default_family(),
    };
    if args.repeat == 0 {
        return Err(CliError::Fatal("--repeat must be at least 1".into()));
    }
    let exp = Experiment {
        spec: &spec,
        instance,
        family,
        problem,
        params: DirichletParams::new(args.common.t, args.common.d)?,
        epsilon: args.eps,
        common: &args.common,
    };
    let mut sink = ReportSink::open(args.common.report.as_deref())?;
    let (_, aborted) = run_series(&exp, args.common.seed, args.repeat, out, &mut sink)?;
    if aborted {
        return Err(CliError::Budget);
    }
    Ok(EXIT_OK)
}

/// `(4^r - 1) / 4^r` as an exact fraction while it fits, else a decimal.
pub fn confidence(runs: u64) -> String {
    if runs == 0 {
        return "0".to_string();
    }
    if runs <= 63 {
        let denominator: u128 = 1u128 << (2 * runs);
        format!("{}/{}", denominator - 1, denominator)
    } else {
        format!("1 - 4^-{runs}")
    }
}

fn cmd_dioph_pair(args: &PairArgs, out: &mut dyn Write) -> CliResult<i32> {
    let eq = load_equation(&args.dioph)?;
    if args.repeat == 0 {
        return Err(CliError::Fatal("--repeat must be at least 1".into()));
    }
    let mut equations = vec![eq.clone()];
    match eq.with_negated_constant() {
        Some(partner) => equations.push(partner),
        None => writeln!(out, "notice: `{eq}` has no constant term; running it alone")?,
    }
    let params = DirichletParams::new(args.common.t, args.common.d)?;
    let mut sink = ReportSink::open(args.common.report.as_deref())?;
    let mut summaries = Vec::new();
    for (i, equation) in equations.iter().enumerate() {
        // The twin gets its own seeds so the two series are independent.
        let first_seed = args.common.seed.wrapping_add(i as u64 * args.repeat);
        let spec = SubsetSpec::Diophantine(equation.clone());
        let exp = Experiment {
            spec: &spec,
            instance: format!("dioph {equation}"),
            family: FamilyKind::Triple3D,
            problem: Problem::Emptiness,
            params,
            epsilon: args.eps,
            common: &args.common,
        };
        let (reports, aborted) = run_series(&exp, first_seed, args.repeat, out, &mut sink)?;
        writeln!(out)?;
        if aborted {
            return Err(CliError::Budget);
        }
        summaries.push((equation.to_string(), reports));
    }
    for (equation, reports) in &summaries {
        let trues = reports.iter().filter(|r| r.answer == Some(true)).count() as u64;
        match reports.iter().find(|r| r.answer == Some(false)) {
            Some(r) => writeln!(
                out,
                "{equation} = 0 has the verified solution {}",
                r.witness.as_deref().unwrap_or("?")
            )?,
            None => writeln!(
                out,
                "{equation} = 0: {trues} of {trues} runs True; with probability ≥ {} its solutions have mass at most {} under the Dirichlet triple distribution (t = {}, d = {})",
                confidence(trues),
                args.eps,
                args.common.t,
                args.common.d
            )?,
        }
    }
    Ok(EXIT_OK)
}

/// One self-test line.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// Size classes compared against enumeration.
const SELFTEST_MAX_M: u64 = 6;
const FORMULA_TOLERANCE: f64 = 1e-12;

/// The self-test checks, in output order.
pub fn selftest_checks(c: f64, printed_3d_formula: bool) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(check(
        format!("sample constant c = {c}"),
        check_constant(c),
        "requires c^3 >= 2c^2 + 5c + 39",
    ));
    for (eps, expected) in [(0.1, 96), (1e-5, 953_206)] {
        let got = PraxConfig::new(eps, 0).map(|cfg| sample_count(&cfg)).ok();
        checks.push(check(format!("sample count at eps = {eps}"), got == Some(expected), format!("got {}", opt(got))));
    }
    for (t, eps, expected) in [(2.0, 1e-5, 400_001u64), (1.5, 0.001, 16_000_001), (1.25, 0.05, 40_960_001)] {
        let got = DirichletParams::new(t, 2).and_then(|p| max_len_3d(&TripleFamily3D::new(p), eps / 2.0)).ok();
        checks.push(check(
            format!("3D maximum size at t = {t}, eps = {eps}"),
            got == Some(expected),
            format!("expected {expected}, got {}", opt(got)),
        ));
    }
    let budget = EnumerationBudget::new(SELFTEST_MAX_M, 1_000_000).expect("positive budget");
    for (t, d) in [(2.0, 0u64), (2.0, 1), (1.5, 2)] {
        let reference = ReferencePmf::new(t, d);
        let params = DirichletParams::new(t, d).expect("valid parameters");
        let fam2 = WordFamily2D::new(params, 2).expect("valid family");
        let fam3 = TripleFamily3D::new(params);
        let mut worst2: f64 = 0.0;
        let mut worst3: f64 = 0.0;
        for m in 0..=SELFTEST_MAX_M {
            let brute2 = brute_size_class_mass(&reference, 2, m, &budget).unwrap_or(f64::NAN);
            let brute3 = brute_size_class_mass(&reference, 3, m, &budget).unwrap_or(f64::NAN);
            let formula3 = if printed_3d_formula { printed_prob_3d(&reference, m) } else { prob_3d(&fam3, m) };
            worst2 = worst2.max((prob_2d(&fam2, m) - brute2).abs());
            worst3 = worst3.max((formula3 - brute3).abs());
        }
        let label = if printed_3d_formula { "uncorrected 3D formula" } else { "3D formula" };
        checks.push(check(
            format!("2D formula vs enumeration at t = {t}, d = {d}"),
            worst2 <= FORMULA_TOLERANCE,
            format!("max difference {worst2:e}"),
        ));
        checks.push(check(
            format!("{label} vs enumeration at t = {t}, d = {d}"),
            worst3 <= FORMULA_TOLERANCE,
            format!("max difference {worst3:e}"),
        ));
    }
    checks
}

fn cmd_selftest(args: &SelftestArgs, out: &mut dyn Write) -> CliResult<i32> {
    let checks = selftest_checks(args.c, args.printed_3d_formula);
    let passed = checks.iter().filter(|c| c.passed).count();
    for c in &checks {
        writeln!(out, "{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    writeln!(out, "{passed}/{} checks passed", checks.len())?;
    Ok(if passed == checks.len() { EXIT_OK } else { EXIT_CHECK_FAILED })
}
