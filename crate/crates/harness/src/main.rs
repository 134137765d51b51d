use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use perfgrid_harness::config::{preset, ConfigError, ExperimentConfig};
use perfgrid_harness::pipeline::{ApproxSummary, Experiment};
use perfgrid_harness::{artifact, figures, selftest};

#[derive(Parser)]
#[command(name = "perfgrid", version, about = "Matrix-less eigenvalue approximation on perfect grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Built-in experiment (laplacian-nd, dirichlet, bilaplacian, preconditioned).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the grid and eigenvalue expansion tables.
    Expand(Source),
    /// Approximate spectra at the target orders.
    Approx {
        #[command(flatten)]
        source: Source,
        /// Target orders; defaults to the config targets.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        /// Truncation orders; defaults to the config list.
        #[arg(long, value_delimiter = ',')]
        beta: Vec<usize>,
        /// Compare against exact eigenvalues.
        #[arg(long)]
        validate: bool,
        /// Use a saved table artifact instead of training.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Solve exact spectra and raw grid errors.
    Exact {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
    },
    /// Render figure data and SVG plots.
    Figures {
        #[command(flatten)]
        source: Source,
        /// Figure numbers; defaults to all.
        #[arg(long, value_delimiter = ',')]
        which: Option<Vec<usize>>,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

enum Outcome {
    Ok,
    Failed,
}

fn load(source: &Source) -> Result<Experiment> {
    let config = match (&source.preset, &source.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => ExperimentConfig::load(path)?,
        (None, None) => {
            return Err(ConfigError::Invalid("one of --preset or --config is required".into()).into());
        }
    };
    Ok(Experiment::new(config, source.out.clone())?)
}

fn or_default(list: &[usize], default: &[usize]) -> Vec<usize> {
    if list.is_empty() { default.to_vec() } else { list.to_vec() }
}

fn print_summary(s: &ApproxSummary) {
    match &s.validation {
        None => println!("{:<5} n={:<6} beta={} -> {}", s.method, s.n, s.beta, s.path.display()),
        Some(v) => println!(
            "{:<5} n={:<6} beta={} raw grid {:.3e} raw symbol {:.3e} approx grid {} approx lambda {:.3e} masked {}",
            s.method,
            s.n,
            s.beta,
            v.grid_error,
            v.symbol_error,
            v.approx_grid_error.map_or("-".to_string(), |e| format!("{e:.3e}")),
            v.approx_lambda_error,
            v.masked
        ),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Expand(source) => {
            let mut exp = load(&source)?;
            let tables = exp.run_expand()?;
            for t in [&tables.grid, &tables.eigenvalue] {
                println!("{:<10} n1={} alpha={} residual {:.3e}", t.kind().as_str(), t.n1(), t.alpha(), t.residual());
                for k in 1..=t.alpha() {
                    println!("  k={k} max |c_k| {:.6e}", t.row_max_abs(k));
                }
            }
            exp.finish()?;
        }
        Command::Approx { source, n, beta, validate, table } => {
            let mut exp = load(&source)?;
            let targets = or_default(&n, &exp.config().targets);
            let betas = or_default(&beta, &exp.config().beta_list);
            let summaries = match table {
                Some(path) => {
                    let t = artifact::load(&path).with_context(|| format!("loading {}", path.display()))?;
                    let mut out = Vec::new();
                    for &n in &targets {
                        for &b in &betas {
                            out.push(exp.run_approx(&t, n, b, validate)?);
                        }
                    }
                    out
                }
                None => exp.run_approx_all(&targets, &betas, validate)?,
            };
            summaries.iter().for_each(print_summary);
            exp.finish()?;
        }
        Command::Exact { source, n } => {
            let mut exp = load(&source)?;
            for n in or_default(&n, &exp.config().targets) {
                println!("{}", exp.run_exact(n)?.display());
            }
            exp.finish()?;
        }
        Command::Figures { source, which } => {
            let mut exp = load(&source)?;
            let which = which.unwrap_or_else(|| figures::FIGURES.collect());
            for path in figures::run_figures(&mut exp, &which)? {
                println!("{}", path.display());
            }
            exp.finish()?;
        }
        Command::Selftest => {
            let results = selftest::run_selftest();
            results.iter().for_each(|r| println!("{r}"));
            if results.iter().any(|r| !r.passed) {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
