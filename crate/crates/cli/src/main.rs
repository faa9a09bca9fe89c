use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fracid_cli::config::ExperimentConfig;
use fracid_cli::plot::emit_map_plot;
use fracid_cli::problem::{box_problem, read_problem, reference_problem, torus_problem};
use fracid_cli::records::{fmt_float, read_records, write_records};
use fracid_cli::sweep::run_sweep;
use fracid_cli::topology::grid_topology_check;
use fracid_core::inverse::{alpha_continuation, identify, InverseError, NewtonConfig};
use fracid_core::spectral::gram_admissibility;
use fracid_core::{CoefficientVector, EvalSpec, FractionalOrder, Observables, SpectralProblem};

const EXIT_INCOMPATIBLE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_INADMISSIBLE: u8 = 4;
const EXIT_CHECK_FAILED: u8 = 5;
const EXIT_USAGE: u8 = 64;

/// Fractional anisotropic diffusion: FEM sweeps and coefficient identification.
///
/// Every flag can also be set through an environment variable named
/// FRACID_<FLAG>, e.g. FRACID_ALPHA=0.75.
#[derive(Parser)]
#[command(name = "fracid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a FEM parameter sweep and write its records as CSV.
    Sweep {
        #[arg(long, env = "FRACID_CONFIG")]
        config: PathBuf,
        /// CSV path; defaults to <output_dir>/<domain>_<initial>.csv.
        #[arg(long, env = "FRACID_OUT")]
        out: Option<PathBuf>,
        /// Also write the map plot here.
        #[arg(long, env = "FRACID_PLOT")]
        plot: Option<PathBuf>,
    },
    /// Draw the norm map of one sweep as SVG.
    Plot {
        #[arg(long = "in", env = "FRACID_IN")]
        input: PathBuf,
        #[arg(long, env = "FRACID_OUT")]
        out: PathBuf,
    },
    /// Check that the mapped λ-grids keep their cell orientation.
    Topology {
        #[arg(long = "in", env = "FRACID_IN")]
        input: PathBuf,
    },
    /// Recover λ from measured energies; prints the result as JSON.
    Identify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', required = true, env = "FRACID_PHI")]
        phi: Vec<f64>,
        #[arg(long, env = "FRACID_ALPHA")]
        alpha: f64,
        #[arg(long, default_value_t = 0.04, env = "FRACID_T_BAR")]
        t_bar: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Continue λ_α along increasing α up to 1; prints CSV.
    Converge {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', required = true, env = "FRACID_PHI")]
        phi: Vec<f64>,
        /// Strictly increasing, ending at 1.
        #[arg(long, value_delimiter = ',', required = true, env = "FRACID_ALPHAS")]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 0.04, env = "FRACID_T_BAR")]
        t_bar: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

/// Exactly one of: a JSON problem file, a Dirichlet box, a Lamé torus, the reference instance.
#[derive(Args)]
struct ProblemArgs {
    #[arg(long, env = "FRACID_PROBLEM")]
    problem: Option<PathBuf>,
    /// Side lengths of a Dirichlet box, one per operator.
    #[arg(long, value_delimiter = ',', env = "FRACID_BOX_LENGTHS")]
    box_lengths: Option<Vec<f64>>,
    #[arg(long, default_value_t = 3, env = "FRACID_BOX_MAX_INDEX")]
    box_max_index: usize,
    /// Lamé modes on the periodic torus with |k_i| up to this bound.
    #[arg(long, env = "FRACID_TORUS_MAX_INDEX")]
    torus_max_index: Option<i64>,
    /// Populated modes: "k1,k2=c" for a box, "k1,k2:l=c" or "k1,k2:t=c" for the torus.
    #[arg(long = "mode", value_delimiter = ';', env = "FRACID_MODES")]
    modes: Vec<String>,
    /// Two modes σ = (1, 0.5), (0.5, 1) with unit coefficients.
    #[arg(long, env = "FRACID_REFERENCE")]
    reference: bool,
}

impl ProblemArgs {
    fn load(&self) -> Result<SpectralProblem> {
        let sources = [self.problem.is_some(), self.box_lengths.is_some(), self.torus_max_index.is_some(), self.reference];
        if sources.iter().filter(|s| **s).count() != 1 {
            bail!("give exactly one of --problem, --box-lengths, --torus-max-index, --reference");
        }
        if !self.modes.is_empty() && (self.problem.is_some() || self.reference) {
            bail!("--mode only applies to --box-lengths and --torus-max-index");
        }
        Ok(if let Some(path) = &self.problem {
            read_problem(path).with_context(|| format!("reading {}", path.display()))?
        } else if let Some(lengths) = &self.box_lengths {
            box_problem(lengths, self.box_max_index, &self.modes)?
        } else if let Some(k) = self.torus_max_index {
            torus_problem(k, &self.modes)?
        } else {
            reference_problem()
        })
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-10, env = "FRACID_TOL")]
    tol: f64,
    #[arg(long, default_value_t = 100, env = "FRACID_MAX_ITER")]
    max_iter: usize,
    #[arg(long, value_delimiter = ',', env = "FRACID_INITIAL_GUESS")]
    initial_guess: Option<Vec<f64>>,
}

impl SolverArgs {
    fn config(&self) -> Result<NewtonConfig> {
        let config = NewtonConfig {
            residual_tol: self.tol,
            max_iterations: self.max_iter,
            initial_guess: self.initial_guess.clone().map(CoefficientVector::new).transpose()?,
            ..NewtonConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        // a reader such as `head` closing the pipe early is not an error
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(())
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io = cause
            .downcast_ref::<std::io::Error>()
            .or_else(|| match cause.downcast_ref::<csv::Error>().map(csv::Error::kind) {
                Some(csv::ErrorKind::Io(io)) => Some(io),
                _ => None,
            });
        io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Sweep { config, out, plot } => {
            let config = ExperimentConfig::from_path(&config).with_context(|| format!("loading {}", config.display()))?;
            let records = run_sweep(&config)?;
            let out = match out {
                Some(p) => p,
                None => {
                    std::fs::create_dir_all(&config.output_dir)?;
                    config.output_dir.join(format!("{}_{}.csv", config.domain()?.id(), config.initial.id()))
                }
            };
            write_records(BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?), &records)?;
            let failed = records.iter().filter(|r| r.error.is_some()).count();
            eprintln!("wrote {} records ({failed} failed) to {}", records.len(), out.display());
            if let Some(path) = plot {
                std::fs::write(&path, emit_map_plot(&records)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { input, out } => {
            let records = read_records(BufReader::new(File::open(&input).with_context(|| format!("opening {}", input.display()))?))?;
            std::fs::write(&out, emit_map_plot(&records)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Topology { input } => {
            let records = read_records(BufReader::new(File::open(&input).with_context(|| format!("opening {}", input.display()))?))?;
            let report = grid_topology_check(&records)?;
            emit(&serde_json::to_string_pretty(&report)?)?;
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CHECK_FAILED) })
        }
        Command::Identify {
            problem,
            phi,
            alpha,
            t_bar,
            solver,
        } => {
            let problem = problem.load()?;
            let spec = EvalSpec::new(FractionalOrder::new(alpha)?, t_bar)?;
            let target = Observables::new(phi)?;
            match identify(&problem, &target, &spec, &solver.config()?) {
                Ok(result) => {
                    emit(&serde_json::to_string_pretty(&result)?)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => inverse_failure(e),
            }
        }
        Command::Converge {
            problem,
            phi,
            alphas,
            t_bar,
            solver,
        } => converge(&problem.load()?, phi, &alphas, t_bar, &solver.config()?),
    }
}

/// Maps solver errors onto exit codes, printing whatever report they carry.
fn inverse_failure(e: InverseError) -> Result<ExitCode> {
    eprintln!("error: {e}");
    match e {
        InverseError::Incompatible { .. } => Ok(ExitCode::from(EXIT_INCOMPATIBLE)),
        InverseError::NotConverged(result) => {
            emit(&serde_json::to_string_pretty(&result)?)?;
            Ok(ExitCode::from(EXIT_NOT_CONVERGED))
        }
        InverseError::Inadmissible(report) => {
            emit(&serde_json::to_string_pretty(&report)?)?;
            Ok(ExitCode::from(EXIT_INADMISSIBLE))
        }
        other => Err(other.into()),
    }
}

fn converge(problem: &SpectralProblem, phi: Vec<f64>, alphas: &[f64], t_bar: f64, config: &NewtonConfig) -> Result<ExitCode> {
    if alphas.last() != Some(&1.0) {
        bail!("--alphas must end with 1");
    }
    let report = gram_admissibility(problem);
    if !report.admissible {
        return inverse_failure(InverseError::Inadmissible(report));
    }
    let target = Observables::new(phi)?;
    let path = alpha_continuation(problem, &target, t_bar, alphas, config)?;
    let classical = path.is_complete().then(|| path.lambdas.last().expect("complete path is nonempty").clone());

    let stdout = std::io::stdout();
    let mut w = csv::Writer::from_writer(stdout.lock());
    let mut header = vec!["alpha".to_string()];
    header.extend((1..=problem.n()).map(|i| format!("lambda{i}")));
    header.push("distance_to_classical".into());
    w.write_record(&header)?;
    for (alpha, lambda) in path.alphas.iter().zip(&path.lambdas) {
        let mut row = vec![fmt_float(*alpha)];
        row.extend(lambda.as_slice().iter().map(|l| fmt_float(*l)));
        row.push(match &classical {
            Some(c) => fmt_float(lambda.as_slice().iter().zip(c.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)),
            None => String::new(),
        });
        w.write_record(&row)?;
    }
    w.flush()?;
    drop(w);
    std::io::stdout().flush()?;
    if let Some(f) = path.failure {
        eprintln!("error: continuation stopped at alpha = {}: {}", f.alpha, f.reason);
        return Ok(ExitCode::from(EXIT_NOT_CONVERGED));
    }
    Ok(ExitCode::SUCCESS)
}
