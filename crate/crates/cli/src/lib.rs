//! Command surface: `solve`, `verify`, `check` and `oracle` over DIMACS
//! files, with SAT-competition output and exit codes.

pub mod dimacs;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sat_transys::cnf::{HasVars, Valuation};
use sat_transys::engine::{
    default_dec_vars, solve_traced, DecideOrder, EngineError, EngineSystem, ForgetPolicy,
    RestartPolicy, Strategy, TraceSink, Verdict,
};
use sat_transys::oracle::{brute_sat, OracleError, DEFAULT_VAR_BUDGET};
use sat_transys::orderings::CheckMode;
use sat_transys::rules::SolverConfig;
use sat_transys::trace::{verify_trace, Header, TraceFile, TraceWriter};

use dimacs::{parse_dimacs, DimacsProblem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;

#[derive(Debug, Parser)]
#[command(name = "satts", version, about = "Run and check DPLL/CDCL transition systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Decide {
    Ascending,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a DIMACS file
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "cdcl", value_parser = parse_system)]
        system: EngineSystem,
        #[arg(long, value_enum, default_value = "ascending")]
        decide: Decide,
        /// Seed for `--decide random`
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// none, every-conflict, luby:UNIT or geometric:BASE:FACTOR
        #[arg(long, default_value = "none", value_parser = parse_restarts)]
        restarts: RestartPolicy,
        /// none or size:MAX_LEARNT:KEEP_RECENT
        #[arg(long, default_value = "none", value_parser = parse_forget)]
        forget: ForgetPolicy,
        /// Write the rule applications to this .satt file
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = sat_transys::engine::DEFAULT_STEP_BUDGET)]
        step_budget: u64,
        /// Reject header mismatches instead of warning
        #[arg(long)]
        strict: bool,
    },
    /// Replay a trace, checking guards, invariants and the measure
    Verify {
        file: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Like verify, for several traces and optionally with semantic checks
    Check {
        file: PathBuf,
        #[arg(long, required = true)]
        trace: Vec<PathBuf>,
        /// Check the semantic invariants by enumerating models
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_VAR_BUDGET)]
        oracle_budget: usize,
        #[arg(long)]
        strict: bool,
    },
    /// Decide satisfiability by enumerating assignments
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VAR_BUDGET)]
        oracle_budget: usize,
        #[arg(long)]
        strict: bool,
    },
}

fn parse_system(s: &str) -> Result<EngineSystem, String> {
    s.parse()
}

fn parse_restarts(s: &str) -> Result<RestartPolicy, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.parse::<u64>().map_err(|e| format!("`{x}`: {e}"));
    match parts.as_slice() {
        ["none"] => Ok(RestartPolicy::None),
        ["every-conflict"] => Ok(RestartPolicy::EveryConflict),
        ["luby", unit] => Ok(RestartPolicy::Luby { unit: num(unit)? }),
        ["geometric", base, factor] => Ok(RestartPolicy::Geometric {
            base: num(base)?,
            factor: factor.parse().map_err(|e| format!("`{factor}`: {e}"))?,
        }),
        _ => Err(format!(
            "unknown restart policy `{s}` (none, every-conflict, luby:UNIT, geometric:BASE:FACTOR)"
        )),
    }
}

fn parse_forget(s: &str) -> Result<ForgetPolicy, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    match parts.as_slice() {
        ["none"] => Ok(ForgetPolicy::None),
        ["size", max, keep] => {
            Ok(ForgetPolicy::SizeThreshold { max_learnt: num(max)?, keep_recent: num(keep)? })
        }
        _ => Err(format!("unknown forget policy `{s}` (none, size:MAX_LEARNT:KEEP_RECENT)")),
    }
}

/// Failure of a command, with its exit code.
struct Exit(i32, String);

fn read_problem(path: &Path, strict: bool, err: &mut dyn Write) -> Result<DimacsProblem, Exit> {
    let text = fs::read_to_string(path)
        .map_err(|e| Exit(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    let p = parse_dimacs(&text, strict)
        .map_err(|e| Exit(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
    for w in &p.warnings {
        let _ = writeln!(err, "warning: {}: {w}", path.display());
    }
    Ok(p)
}

fn model_line(m: &Valuation) -> String {
    let mut lits: Vec<i32> = m.literals().iter().map(|l| l.to_dimacs()).collect();
    lits.sort_by_key(|l| l.unsigned_abs());
    let mut line = String::from("v");
    for l in lits {
        line.push_str(&format!(" {l}"));
    }
    line.push_str(" 0");
    line
}

fn io_fail(e: std::io::Error) -> Exit {
    Exit(EXIT_FAILURE, e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    file: &Path,
    strategy: Strategy,
    trace: Option<&Path>,
    strict: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let p = read_problem(file, strict, err)?;
    let config = SolverConfig::with_dec_vars(default_dec_vars(&p.formula, p.declared_vars));
    let mut writer = match trace {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| Exit(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
            let header = Header::for_run(strategy.rule_system(), &p.formula, &config);
            Some(TraceWriter::new(BufWriter::new(f), &header).map_err(io_fail)?)
        }
        None => None,
    };
    let result = solve_traced(
        &p.formula,
        &config,
        &strategy,
        writer.as_mut().map(|w| w as &mut dyn TraceSink),
    );
    if let Some(w) = writer {
        w.finish().map_err(io_fail)?;
    }
    let answer = match result {
        Ok(a) => a,
        Err(EngineError::Budget { budget, stats }) => {
            writeln!(out, "c step budget of {budget} exhausted after {} conflicts", stats.conflicts)
                .map_err(io_fail)?;
            writeln!(out, "s UNKNOWN").map_err(io_fail)?;
            return Ok(EXIT_BUDGET);
        }
        Err(e) => return Err(Exit(EXIT_FAILURE, e.to_string())),
    };
    let s = answer.stats;
    writeln!(
        out,
        "c system {} steps {} decisions {} propagations {} conflicts {} learnt {} restarts {} forgotten {}",
        answer.system, s.steps, s.decisions, s.propagations, s.conflicts, s.learnt, s.restarts, s.forgotten
    )
    .map_err(io_fail)?;
    match (answer.verdict, &answer.model) {
        (Verdict::Sat, Some(m)) => {
            writeln!(out, "s SATISFIABLE\n{}", model_line(m)).map_err(io_fail)?;
            Ok(EXIT_SAT)
        }
        _ => {
            writeln!(out, "s UNSATISFIABLE").map_err(io_fail)?;
            Ok(EXIT_UNSAT)
        }
    }
}

fn verify(
    file: &Path,
    traces: &[PathBuf],
    mode: CheckMode,
    oracle_budget: usize,
    strict: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let p = read_problem(file, strict, err)?;
    let config = SolverConfig { oracle_budget, ..SolverConfig::default() };
    let mut code = EXIT_OK;
    for path in traces {
        let text = fs::read_to_string(path)
            .map_err(|e| Exit(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
        let result = TraceFile::parse(&text)
            .and_then(|t| verify_trace(&p.formula, &config, &t, mode).map(|v| (t, v)));
        match result {
            Err(e) => {
                writeln!(out, "{}: FAILED: {e}", path.display()).map_err(io_fail)?;
                code = EXIT_FAILURE;
            }
            Ok((_, v)) => match &v.result {
                Ok(()) => writeln!(
                    out,
                    "{}: OK: {} steps certified, final state {:?}",
                    path.display(),
                    v.certified,
                    v.outcome
                )
                .map_err(io_fail)?,
                Err(f) => {
                    writeln!(out, "{}: FAILED at {f}", path.display()).map_err(io_fail)?;
                    code = EXIT_FAILURE;
                }
            },
        }
    }
    Ok(code)
}

fn oracle(
    file: &Path,
    budget: usize,
    strict: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let p = read_problem(file, strict, err)?;
    let vars = default_dec_vars(&p.formula, p.declared_vars);
    debug_assert!(p.formula.vars().is_subset(&vars));
    if vars.len() > budget {
        let e = OracleError::BudgetExceeded { needed: vars.len(), budget };
        writeln!(out, "c {e}\ns UNKNOWN").map_err(io_fail)?;
        return Ok(EXIT_BUDGET);
    }
    match brute_sat(&p.formula, &vars) {
        Ok(r) => match r.model {
            Some(m) if r.satisfiable => {
                writeln!(out, "s SATISFIABLE\n{}", model_line(&m)).map_err(io_fail)?;
                Ok(EXIT_SAT)
            }
            _ => {
                writeln!(out, "s UNSATISFIABLE").map_err(io_fail)?;
                Ok(EXIT_UNSAT)
            }
        },
        Err(e) => {
            writeln!(out, "c {e}\ns UNKNOWN").map_err(io_fail)?;
            Ok(EXIT_BUDGET)
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve {
            file,
            system,
            decide,
            seed,
            restarts,
            forget,
            trace,
            step_budget,
            strict,
        } => {
            let order = match decide {
                Decide::Ascending => DecideOrder::Ascending,
                Decide::Random => DecideOrder::RandomSeeded(seed),
            };
            let strategy = Strategy::new(system)
                .with_decide_order(order)
                .with_restart(restarts)
                .with_forget(forget)
                .with_step_budget(step_budget);
            solve(&file, strategy, trace.as_deref(), strict, out, err)
        }
        Command::Verify { file, trace, strict } => verify(
            &file,
            std::slice::from_ref(&trace),
            CheckMode::Cheap,
            DEFAULT_VAR_BUDGET,
            strict,
            out,
            err,
        ),
        Command::Check { file, trace, oracle, oracle_budget, strict } => {
            let mode = if oracle { CheckMode::Oracle } else { CheckMode::Cheap };
            verify(&file, &trace, mode, oracle_budget, strict, out, err)
        }
        Command::Oracle { file, oracle_budget, strict } => {
            oracle(&file, oracle_budget, strict, out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
