//! `frames` — construct, classify and exploit projector sets for
//! density-matrix reconstruction.
//!
//! Every run reads and writes the canonical newline-terminated JSON formats
//! of `frames-core`; fixed seeds make counts and reports bitwise
//! reproducible. Exit codes: 0 success, 2 invalid input, 3 numerical
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use frames_core::classify::classify;
use frames_core::json;
use frames_core::matrix::{ComplexMatrix, DEFAULT_TOL};
use frames_core::separability::{minimize_beta_lp, separable_form};
use frames_core::sets::{
    compose, mub_prime, standard_complete, standard_representative, weyl_complete, ProjectorSet,
};
use frames_core::tomography::{estimate, sample_counts, trace_distance};
use frames_core::{Error, ErrorClass};

/// Environment variable overriding the default predicate tolerance.
const TOL_ENV: &str = "FRAMES_TOL";

#[derive(Parser)]
#[command(name = "frames", version, about = "Projector frames for density-matrix reconstruction")]
struct Cli {
    /// Predicate tolerance (default 1e-9; FRAMES_TOL overrides the default).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// n^2 kets |k>, (|k>+|l>)/sqrt(2), (|k>+i|l>)/sqrt(2); ungrouped.
    StandardRep,
    /// (2n-1)n kets grouped into n^2-n+1 substitution bases.
    StandardComplete,
    /// p+1 mutually unbiased eigenbases of the shift/clock pair (prime p).
    MubPrime,
    /// Eigenbases of all nontrivial Weyl monomials, merged; any dimension.
    WeylComplete,
    /// Tensor product of the sets given with --sets.
    Compose,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a projector family and write its JSON.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// Dimension (all families except compose).
        #[arg(long)]
        dim: Option<usize>,
        /// Input set files for compose, comma separated.
        #[arg(long, value_delimiter = ',')]
        sets: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a set file against the taxonomy.
    Classify {
        #[arg(long)]
        set: PathBuf,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample seeded measurement counts and estimate the state back.
    TomoSim {
        #[arg(long)]
        set: PathBuf,
        /// Density-matrix JSON file.
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Writes PREFIX.counts.json, PREFIX.estimate.json, PREFIX.metrics.json.
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Constructive separable decomposition over the composed sets.
    Decompose {
        /// Per-subsystem set files, comma separated (at least two).
        #[arg(long, value_delimiter = ',')]
        sets: Vec<PathBuf>,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal-beta separable decomposition (linear program over the frame).
    Robustness {
        #[arg(long, value_delimiter = ',')]
        sets: Vec<PathBuf>,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    class: &'a str,
    message: String,
}

#[derive(Serialize)]
struct Metrics<'a> {
    set_provenance: &'a str,
    shots_per_basis: u64,
    seed: u64,
    frobenius_error: f64,
    trace_distance: f64,
}

enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Numerical => 3,
            },
        }
    }

    fn report(&self) -> String {
        let (class, message) = match self {
            CliError::Usage(m) => ("validation", m.clone()),
            CliError::Core(e) => (
                match e.class() {
                    ErrorClass::Validation => "validation",
                    ErrorClass::Numerical => "numerical",
                },
                e.to_string(),
            ),
        };
        json::to_json_string(&ErrorJson {
            error: ErrorBody { class, message },
        })
        .unwrap_or_else(|_| format!("{{\"error\":{{\"class\":\"{class}\"}}}}\n"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = resolve_tol(cli.tol);
    match run(cli.command, tol) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}

fn resolve_tol(flag: Option<f64>) -> f64 {
    if let Some(t) = flag {
        return t;
    }
    match std::env::var(TOL_ENV) {
        Ok(s) => s.parse().unwrap_or(DEFAULT_TOL),
        Err(_) => DEFAULT_TOL,
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_output(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_set(path: &Path, tol: f64) -> Result<ProjectorSet, CliError> {
    Ok(ProjectorSet::from_json(&read_to_string(path)?, tol)?)
}

fn load_state(path: &Path) -> Result<ComplexMatrix, CliError> {
    Ok(json::matrix_from_json(&read_to_string(path)?)?)
}

/// Load and left-fold the per-subsystem sets into one product frame.
fn composed_set(paths: &[PathBuf], tol: f64) -> Result<ProjectorSet, CliError> {
    if paths.len() < 2 {
        return Err(CliError::Usage(
            "--sets needs at least two comma-separated files".into(),
        ));
    }
    let mut acc = load_set(&paths[0], tol)?;
    for path in &paths[1..] {
        let next = load_set(path, tol)?;
        acc = compose(&acc, &next, tol)?;
    }
    Ok(acc)
}

fn run(command: Command, tol: f64) -> Result<(), CliError> {
    match command {
        Command::Generate { family, dim, sets, out } => {
            let set = match family {
                Family::Compose => {
                    if dim.is_some() {
                        return Err(CliError::Usage("compose takes --sets, not --dim".into()));
                    }
                    composed_set(&sets, tol)?
                }
                _ => {
                    if !sets.is_empty() {
                        return Err(CliError::Usage(
                            "--sets is only valid with --family compose".into(),
                        ));
                    }
                    let n = dim.ok_or_else(|| CliError::Usage("--dim is required".into()))?;
                    match family {
                        Family::StandardRep => standard_representative(n, tol)?,
                        Family::StandardComplete => standard_complete(n, tol)?,
                        Family::MubPrime => mub_prime(n, tol)?,
                        Family::WeylComplete => weyl_complete(n, tol)?,
                        Family::Compose => unreachable!(),
                    }
                }
            };
            write_output(&out, &set.to_json()?)
        }
        Command::Classify { set, out } => {
            let set = load_set(&set, tol)?;
            let report = classify(&set, tol);
            emit(out.as_deref(), &report.to_json()?)
        }
        Command::TomoSim { set, state, shots, seed, out_prefix } => {
            let set = load_set(&set, tol)?;
            let rho = load_state(&state)?;
            let counts = sample_counts(&set, &rho, shots, seed, tol)?;
            let estimated = estimate(&set, &counts, tol)?;
            let metrics = Metrics {
                set_provenance: set.provenance(),
                shots_per_basis: shots,
                seed,
                frobenius_error: (&estimated - &rho).frobenius_norm(),
                trace_distance: trace_distance(&estimated, &rho)?,
            };
            let prefix = out_prefix.display();
            write_output(&PathBuf::from(format!("{prefix}.counts.json")), &counts.to_json()?)?;
            write_output(
                &PathBuf::from(format!("{prefix}.estimate.json")),
                &json::matrix_to_json(&estimated)?,
            )?;
            write_output(
                &PathBuf::from(format!("{prefix}.metrics.json")),
                &json::to_json_string(&metrics)?,
            )
        }
        Command::Decompose { sets, state, out } => {
            let set = composed_set(&sets, tol)?;
            let rho = load_state(&state)?;
            let form = separable_form(&set, &rho, tol)?;
            emit(out.as_deref(), &form.to_json()?)
        }
        Command::Robustness { sets, state, out } => {
            let set = composed_set(&sets, tol)?;
            let rho = load_state(&state)?;
            let form = minimize_beta_lp(&set, &rho, tol)?;
            emit(out.as_deref(), &form.to_json()?)
        }
    }
}
