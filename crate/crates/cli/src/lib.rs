//! Command-line front end for the GMM constraint solver.
//!
//! Exit codes: 0 for a satisfiable instance (or a successful command), 1
//! for an unsatisfiable instance (or a failed check), 2 for any error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gmm_csp::format::{parse_instance, parse_operation, serialize_instance, FormatError, ParsedInstance};
use gmm_csp::generate::{gen_instance, Family, GenerateError, GeneratorSpec};
use gmm_csp::oracle::{brute_force_solve, enumerate_solutions, OracleBudget, OracleError};
use gmm_csp::relations::{check_representation, RelationError};
use gmm_csp::solver::{SolveError, SolverConfig};
use gmm_csp::{Gmm, GmmSolver, SolveResult, SolveStatus, Tuple};
use thiserror::Error;

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub const CLOSURE_CAP_VAR: &str = "GMM_CLOSURE_CAP";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("{CLOSURE_CAP_VAR} must be a positive integer, got {0:?}")]
    BadClosureCap(String),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "gmmcsp", version, about = "Solve CSP instances invariant under a GMM operation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide an instance with the polynomial-time solver.
    Solve {
        file: PathBuf,
        /// Print a satisfying assignment as `w v1 .. vn`.
        #[arg(long)]
        witness: bool,
        /// Check every constraint relation for invariance first.
        #[arg(long, value_enum, default_value = "on")]
        validate: Switch,
        /// Print per-constraint representation sizes and timings to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Decide an instance by enumerating all assignments.
    Oracle {
        file: PathBuf,
        /// Largest number of assignments to enumerate.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        witness: bool,
    },
    /// Inspect the operation of a file.
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Generate a random instance.
    Gen {
        #[arg(value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        constraints: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Check every intermediate representation of a solver run against
    /// brute-force enumeration.
    CheckRep {
        file: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum OpAction {
    /// Classify every pair of domain elements as majority or minority.
    Classify { file: PathBuf },
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: GenerateError| e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path, err: &mut dyn Write) -> Result<ParsedInstance, CliError> {
    let parsed = parse_instance(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })?;
    for w in &parsed.warnings {
        writeln!(err, "warning: {}: {w}", path.display())?;
    }
    Ok(parsed)
}

fn closure_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(CLOSURE_CAP_VAR) {
        Ok(v) => match v.trim().parse() {
            Ok(cap) if cap > 0 => Ok(Some(cap)),
            _ => Err(CliError::BadClosureCap(v)),
        },
        Err(_) => Ok(None),
    }
}

fn solver_config(validate: bool) -> Result<SolverConfig, CliError> {
    let mut config = SolverConfig {
        validate_constraints: validate,
        ..SolverConfig::default()
    };
    if let Some(cap) = closure_cap()? {
        config.closure_cap = cap;
    }
    Ok(config)
}

fn oracle_budget(assignments: Option<usize>) -> Result<OracleBudget, CliError> {
    let mut budget = OracleBudget::default();
    if let Some(a) = assignments {
        budget.max_assignments = a;
    }
    if let Some(cap) = closure_cap()? {
        budget.max_closure_tuples = cap;
    }
    Ok(budget)
}

fn write_witness(out: &mut dyn Write, w: &Tuple) -> std::io::Result<()> {
    write!(out, "w")?;
    for v in w.iter() {
        write!(out, " {v}")?;
    }
    writeln!(out)
}

fn report(out: &mut dyn Write, result: &SolveResult, witness: bool) -> Result<i32, CliError> {
    match result.status {
        SolveStatus::Sat => {
            writeln!(out, "SAT")?;
            if let (true, Some(w)) = (witness, &result.witness) {
                write_witness(out, w)?;
            }
            Ok(EXIT_SAT)
        }
        SolveStatus::Unsat => {
            writeln!(out, "UNSAT")?;
            Ok(EXIT_UNSAT)
        }
    }
}

fn solve_cmd(
    file: &Path,
    witness: bool,
    validate: bool,
    stats: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let parsed = load(file, err)?;
    let gmm = Gmm::new(parsed.op).map_err(SolveError::from)?;
    let solver = GmmSolver::with_config(&gmm, solver_config(validate)?);
    let result = solver.solve(&parsed.instance)?;
    if stats {
        for (l, (size, time)) in result.stats.rep_sizes.iter().zip(&result.stats.timings).enumerate() {
            writeln!(err, "c step {l} rep {size} time {:.6}s", time.as_secs_f64())?;
        }
        writeln!(
            err,
            "c max_rep {} compactness_violations {}",
            result.stats.max_rep_size, result.stats.compactness_violations
        )?;
    }
    report(out, &result, witness)
}

fn classify_cmd(file: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let op = parse_operation(&read(file)?).map_err(|source| CliError::Format {
        path: file.to_path_buf(),
        source,
    })?;
    match op.validate_gmm() {
        Ok(pairs) => {
            for (a, b, kind) in pairs.unordered() {
                writeln!(out, "{a} {b} {kind}")?;
            }
            Ok(EXIT_SAT)
        }
        Err(e) => {
            writeln!(out, "{e}")?;
            Ok(EXIT_ERROR)
        }
    }
}

fn check_rep_cmd(
    file: &Path,
    budget: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let parsed = load(file, err)?;
    let budget = oracle_budget(budget)?;
    let gmm = Gmm::new(parsed.op).map_err(SolveError::from)?;
    let solver = GmmSolver::with_config(&gmm, solver_config(true)?);
    let mut states = Vec::new();
    solver.solve_observed(&parsed.instance, |s| states.push(s.clone()))?;
    for st in &states {
        let want = enumerate_solutions(&parsed.instance.prefix(st.applied), &budget)?;
        let got = solver.explicit_solution_relation(st)?;
        let compact = got == want && check_representation(st.rep.rep(), &want, gmm.arity() - 1, gmm.pairs())?;
        if !compact {
            writeln!(out, "MISMATCH after {} constraints", st.applied)?;
            return Ok(EXIT_UNSAT);
        }
    }
    writeln!(out, "OK {} states", states.len())?;
    Ok(EXIT_SAT)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve {
            file,
            witness,
            validate,
            stats,
        } => solve_cmd(&file, witness, validate == Switch::On, stats, out, err),
        Command::Oracle { file, budget, witness } => {
            let parsed = load(&file, err)?;
            let result = brute_force_solve(&parsed.instance, &oracle_budget(budget)?)?;
            report(out, &result, witness)
        }
        Command::Op {
            action: OpAction::Classify { file },
        } => classify_cmd(&file, out),
        Command::Gen {
            family,
            vars,
            constraints,
            seed,
            output,
        } => {
            let spec = GeneratorSpec {
                family,
                num_vars: vars,
                num_constraints: constraints,
                seed,
            };
            let (op, instance) = gen_instance(&spec)?;
            let text = serialize_instance(&op, &instance);
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_SAT)
        }
        Command::CheckRep { file, budget } => check_rep_cmd(&file, budget, out, err),
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_SAT };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
