//! The `coldopt` command line: scenario files in, reports and CSV out.
//!
//! Exit codes: 0 success, 2 usage, parse or input errors, 3 infeasible
//! scenario, 4 numerical failure (including failed validation checks).

mod output;
pub mod scenario;
mod validate;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::{
    check_trend, on_hand_nonnegative, sweep_with, write_sweep_csv, Parameter, SweepSpec, TrendDirection,
};
use crate::error::Error;
use crate::exec::{self, Execution};
use crate::quality::{fit_ols, generate_dataset_with, read_dataset_csv, write_dataset_csv};
use crate::solver::solve_with;

pub use output::{write_atomic, write_solution_csv, SOLUTION_CSV_HEADER};
pub use scenario::{
    load_scenario, model_fragment, parse_model_fragment, parse_scenario, GeneratorSection, ScenarioError,
    ScenarioFile, SCHEMA_VERSION,
};
pub use validate::{
    validate_scenario, write_validate_csv, Check, ValidationReport, DEFAULT_MC_SAMPLES, VALIDATE_CSV_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "COLDOPT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "coldopt", version, about = "Cold-warehouse lot size, reorder point and climate optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a scenario and write the per-combination table.
    Solve {
        scenario: PathBuf,
        #[arg(long, default_value = "solution.csv")]
        out: PathBuf,
    },
    /// Re-solve the scenario over a range of one parameter.
    Sweep {
        scenario: PathBuf,
        /// Parameter symbol (h, pi, B, Qual, ...) or scenario field name.
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Generate a synthetic quality dataset from the scenario's generator.
    GenData {
        scenario: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the quality model to a dataset and write a `[quality_model]` table.
    Fit {
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the solver against grid oracles and Monte Carlo.
    Validate {
        scenario: PathBuf,
        #[arg(long, default_value = "validate.csv")]
        out: PathBuf,
        /// Monte Carlo samples per check.
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        samples: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Scenario(ScenarioError),
    Io(String),
    Core(Error),
    ChecksFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Scenario(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(Error::Domain(_)) => EXIT_USAGE,
            CliError::Core(Error::Infeasible(_)) => EXIT_INFEASIBLE,
            CliError::Core(Error::SingularFit { .. } | Error::Numerical(_)) => EXIT_NUMERICAL,
            CliError::ChecksFailed(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Scenario(e) => e.fmt(f),
            CliError::Core(Error::Infeasible(d)) => f.write_str(output::diagnosis_report(d).trim_end()),
            CliError::Core(e) => e.fmt(f),
            CliError::ChecksFailed(n) => write!(f, "{n} validation check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Scenario(e)
    }
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))),
        Err(e) => Err(CliError::Usage(format!("{THREADS_ENV}: {e}"))),
    }
}

fn write_file<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn std::io::Write) -> crate::Result<()>,
{
    write_atomic(path, fill).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match thread_cap().map(exec::init_threads).and_then(|_| dispatch(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let exec = Execution::default();
    match command {
        Command::Solve { scenario, out } => {
            let file = load_scenario(&scenario)?;
            let solution = solve_with(&file.params, &file.model, exec)?;
            print!("{}", output::solution_report(&solution));
            write_file(&out, |w| write_solution_csv(&file.params, &solution, w))?;
            println!("wrote {}", out.display());
        }
        Command::Sweep { scenario, param, from, to, steps, out } => {
            let file = load_scenario(&scenario)?;
            let parameter: Parameter = param.parse()?;
            let spec = SweepSpec { parameter, from, to, steps };
            let result = sweep_with(&file.params, &file.model, &spec, exec)?;
            write_file(&out, |w| write_sweep_csv(&result, w))?;
            let on_hand_ok = on_hand_nonnegative(&result);
            let mut verdicts = Vec::new();
            for dir in [TrendDirection::NonDecreasing, TrendDirection::NonIncreasing] {
                match check_trend(&result, dir) {
                    Ok(v) => {
                        let note = (parameter == Parameter::HoldingCost && !on_hand_ok)
                            .then(|| "expected on-hand < 0 at some optimum".to_string());
                        verdicts.push((v, note));
                    }
                    Err(e) => println!("{}: not checked ({e})", dir.name()),
                }
            }
            print!("{}", output::sweep_report(&result, &verdicts));
            println!("wrote {}", out.display());
        }
        Command::GenData { scenario, n, out } => {
            let file = load_scenario(&scenario)?;
            let data = generate_dataset_with(&file.generator_spec(), n, exec)?;
            write_file(&out, |w| write_dataset_csv(&data, w))?;
            println!("wrote {} rows to {}", data.len(), out.display());
        }
        Command::Fit { data, out } => {
            let f = std::fs::File::open(&data)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", data.display())))?;
            let dataset = read_dataset_csv(std::io::BufReader::new(f))?;
            let report = fit_ols(&dataset)?;
            print!("{}", output::fit_report(&report));
            let text = format!(
                "# fitted on {} rows, r_squared = {}, residual_std = {}\n{}",
                report.n_rows,
                report.r_squared,
                report.residual_std,
                model_fragment(&report.model)
            );
            write_file(&out, |w| w.write_all(text.as_bytes()).map_err(|e| Error::Numerical(e.to_string())))?;
            println!("wrote {}", out.display());
        }
        Command::Validate { scenario, out, samples } => {
            let file = load_scenario(&scenario)?;
            let report = validate_scenario(&file, samples, exec)?;
            write_file(&out, |w| write_validate_csv(&report, w))?;
            print!("{}", output::validation_report(&report));
            println!("wrote {}", out.display());
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
            if let Some(d) = report.infeasible {
                return Err(CliError::Core(Error::Infeasible(d)));
            }
        }
    }
    Ok(())
}
