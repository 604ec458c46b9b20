//! Headless driver for the solver core.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpwork_core::io::{parse_problem, problem_to_json, trace_to_json, traces_to_json};
use lpwork_core::sweep::{angle_step_offsets, bench, rotate_sweep, step_offsets};
use lpwork_core::{solve, validate_problem, Algorithm, PdhgMode, ProblemSpec, SolverSettings, Status};

#[derive(Parser)]
#[command(name = "lpwork", version, about = "Two-variable LP workbench: convert, solve, sweep and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fill in the constraints of a problem given by vertices.
    Convert(IoArgs),
    /// Solve a problem and write its trace.
    Solve {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        settings: SettingsArgs,
    },
    /// Rotate the objective through a full (or quarter) turn, solving at every angle.
    Rotate {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        /// Number of equal increments.
        #[arg(long, conflicts_with = "angle_step", required_unless_present = "angle_step")]
        steps: Option<usize>,
        /// Fixed increment in radians.
        #[arg(long)]
        angle_step: Option<f64>,
        /// Sweep a closed quarter turn instead of a full turn.
        #[arg(long)]
        quarter: bool,
        #[command(flatten)]
        settings: SettingsArgs,
    },
    /// Time every solver on a regular polygon.
    Bench {
        /// Number of constraints.
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[command(flatten)]
        settings: SettingsArgs,
    },
    /// Check a problem file and report its issues.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output file; `-` or absent writes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Simplex,
    Ipm,
    Pdhg,
    CentralPath,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Simplex => Algorithm::Simplex,
            AlgorithmArg::Ipm => Algorithm::Ipm,
            AlgorithmArg::Pdhg => Algorithm::Pdhg,
            AlgorithmArg::CentralPath => Algorithm::CentralPath,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Equality,
    Inequality,
}

#[derive(Args)]
struct SettingsArgs {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long)]
    corrector_threshold: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// PDHG primal and dual step (overrides the automatic step).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    halpern: bool,
    #[arg(long)]
    restart_factor: Option<f64>,
    #[arg(long)]
    mu_count: Option<usize>,
}

impl SettingsArgs {
    fn settings(&self) -> SolverSettings {
        let d = SolverSettings::default();
        SolverSettings {
            tolerance: self.tol.unwrap_or(d.tolerance),
            max_iterations: self.maxit,
            alpha_max: self.alpha_max.unwrap_or(d.alpha_max),
            corrector_threshold: self.corrector_threshold.unwrap_or(d.corrector_threshold),
            pdhg_mode: match self.mode {
                Some(ModeArg::Equality) => PdhgMode::Equality,
                Some(ModeArg::Inequality) => PdhgMode::Inequality,
                None => d.pdhg_mode,
            },
            pdhg_step: self.step,
            halpern: self.halpern,
            restart_factor: self.restart_factor.unwrap_or(d.restart_factor),
            mu_count: self.mu_count.unwrap_or(d.mu_count),
            angle: None,
        }
    }
}

type CliResult = Result<ExitCode, String>;

fn read_problem(path: &Path) -> Result<ProblemSpec, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_problem(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) if p != Path::new("-") => {
            fs::write(p, format!("{text}\n")).map_err(|e| format!("{}: {e}", p.display()))
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| e.to_string())
        }
    }
}

fn status_code(status: Status) -> ExitCode {
    ExitCode::from(match status {
        Status::Optimal => 0,
        Status::Unbounded => 2,
        Status::Infeasible => 3,
        Status::MaxIterations => 4,
    })
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Convert(io) => {
            let spec = read_problem(&io.input)?;
            if spec.vertices.is_empty() {
                return Err(format!("{}: convert needs vertices", io.input.display()));
            }
            write_output(io.out.as_deref(), &problem_to_json(&spec).map_err(|e| e.to_string())?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { io, algorithm, settings } => {
            let spec = read_problem(&io.input)?;
            let trace = solve(&spec, algorithm.into(), &settings.settings()).map_err(|e| e.to_string())?;
            write_output(io.out.as_deref(), &trace_to_json(&trace).map_err(|e| e.to_string())?)?;
            Ok(status_code(trace.status))
        }
        Command::Rotate { io, algorithm, steps, angle_step, quarter, settings } => {
            let spec = read_problem(&io.input)?;
            let offsets = match (steps, angle_step) {
                (Some(n), _) => step_offsets(n, quarter),
                (None, Some(step)) => angle_step_offsets(step, quarter),
                (None, None) => unreachable!("clap requires --steps or --angle-step"),
            }
            .map_err(|e| e.to_string())?;
            let traces =
                rotate_sweep(&spec, algorithm.into(), &settings.settings(), &offsets).map_err(|e| e.to_string())?;
            write_output(io.out.as_deref(), &traces_to_json(&traces).map_err(|e| e.to_string())?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { m, repeats, settings } => {
            let rows = bench(m, repeats, &settings.settings()).map_err(|e| e.to_string())?;
            let mut out = format!("{:<14}{:>12}{:>12}{:>16}\n", "solver", "median_ms", "iterations", "objective");
            for r in rows {
                let obj = r.objective_value.map_or_else(|| "-".to_owned(), |v| format!("{v:.6}"));
                out.push_str(&format!("{:<14}{:>12.3}{:>12}{:>16}\n", r.name, r.median_ms, r.iterations, obj));
            }
            print!("{out}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { input } => {
            let spec = read_problem(&input)?;
            let report = validate_problem(&spec);
            if report.is_valid() {
                println!("valid: {} constraints", spec.m());
                Ok(ExitCode::SUCCESS)
            } else {
                for msg in report.messages() {
                    eprintln!("{}: {msg}", input.display());
                }
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("lpwork: {msg}");
            ExitCode::FAILURE
        }
    }
}
