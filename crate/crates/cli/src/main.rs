//! `nlsob`: runs one analysis per invocation and writes `report.json`, plus
//! `solution.csv` or `samples.csv` where the command produces tabular data.

mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::Outcome;
use crate::config::{RunConfig, DEFAULT_CONFIG};
use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "nlsob", version, about = "Nonlocal variable-exponent Sobolev toolkit")]
pub struct Cli {
    /// TOML run configuration; the built-in default is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for report.json and CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Overrides the solver tolerance of the configured problem.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Lebesgue,
    Sobolev,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Checks the exponent and kernel admissibility.
    ValidateKernel,
    /// Luxemburg norm in L^q or the full fractional norm.
    Norm {
        #[arg(long, value_enum, default_value_t = Space::Lebesgue)]
        space: Space,
    },
    /// Gagliardo seminorm and its modular relations.
    Seminorm,
    /// Compares the singular-kernel seminorm with the configured one on random functions.
    CompareSpaces,
    /// Lebesgue-to-Sobolev norm ratios on random functions.
    EmbeddingScan,
    /// Identity, monotonicity, coercivity and boundedness probes of the weak operator.
    OperatorProbe,
    /// Solves the Dirichlet problem.
    Solve,
    /// Mountain-pass geometry and a nontrivial critical point of the Kirchhoff functional.
    SolveKirchhoff,
    /// Runs every invariant with seeded random inputs.
    Properties,
    /// Prints the default configuration.
    DefaultConfig,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ValidateKernel => "validate-kernel",
            Command::Norm { .. } => "norm",
            Command::Seminorm => "seminorm",
            Command::CompareSpaces => "compare-spaces",
            Command::EmbeddingScan => "embedding-scan",
            Command::OperatorProbe => "operator-probe",
            Command::Solve => "solve",
            Command::SolveKirchhoff => "solve-kirchhoff",
            Command::Properties => "properties",
            Command::DefaultConfig => "default-config",
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::parse(DEFAULT_CONFIG)?,
    };
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::config(format!("--tol {tol} must be positive")));
        }
        cfg.tolerances.dirichlet = tol;
        cfg.tolerances.kirchhoff = tol;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.dir.as_ref().map(PathBuf::from)))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if matches!(cli.command, Command::DefaultConfig) {
        print!("{DEFAULT_CONFIG}");
        return ExitCode::SUCCESS;
    }
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("warning: thread pool already initialised: {e}");
        }
    }
    let name = cli.command.name();
    let cfg = load_config(&cli);
    let out = out_dir(&cli, cfg.as_ref().ok());
    let seed = cfg.as_ref().map(RunConfig::seed).ok();
    let outcome = cfg.and_then(|cfg| {
        std::fs::create_dir_all(&out).map_err(|e| Failure::io(format!("cannot create {}: {e}", out.display())))?;
        commands::run(&cli.command, &cfg, &out)
    });
    let code = match outcome {
        Ok(Outcome { pass, .. }) => {
            if pass {
                failure::EXIT_PASS
            } else {
                failure::EXIT_VALIDATION
            }
        }
        Err(f) => {
            eprintln!("{name}: {f}");
            if let Err(e) = commands::write_failure(&out, name, seed, &f) {
                eprintln!("{name}: {e}");
            }
            f.code
        }
    };
    ExitCode::from(code)
}
