use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use vadapt::driver::{self, ConfigFile, RunOptions};
use vadapt::{Criterion, DriverConfig, ProblemId};

#[derive(Parser)]
#[command(name = "vadapt", version, about = "Energy-driven adaptive P1 finite elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive loop and write the convergence table and plot.
    Run {
        #[arg(long)]
        problem: String,
        /// tail_off, relative or default
        #[arg(long)]
        criterion: String,
        /// key = value file; missing keys take the catalog defaults
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Compute iteration errors (linear) or a self-reference (nonlinear).
        #[arg(long)]
        diagnostics: bool,
        /// Write a mesh snapshot per step.
        #[arg(long)]
        snapshots: bool,
        /// Fill the wall_s column (makes the table non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// List the problem catalog.
    ListProblems,
    /// Check a configuration file and print the resolved parameters.
    ValidateConfig {
        path: PathBuf,
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        criterion: Option<String>,
    },
}

fn load(path: Option<&PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ConfigFile::parse(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(ConfigFile::default()),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    match Cli::parse().command {
        Command::ListProblems => {
            for p in ProblemId::ALL {
                println!("{:<16}{}", p.as_str(), p.description());
            }
        }
        Command::ValidateConfig {
            path,
            problem,
            criterion,
        } => {
            let file = load(Some(&path))?;
            let problem = problem.map(|p| p.parse::<ProblemId>()).transpose()?;
            let criterion = criterion.map(|c| c.parse::<Criterion>()).transpose()?;
            let cfg = DriverConfig::from_file(&file, problem, criterion)?;
            print!("{}", cfg.to_config_string());
        }
        Command::Run {
            problem,
            criterion,
            config,
            out,
            diagnostics,
            snapshots,
            timing,
        } => {
            let file = load(config.as_ref())?;
            let mut cfg = DriverConfig::from_file(&file, Some(problem.parse()?), Some(criterion.parse()?))?;
            cfg.diagnostics = diagnostics;
            cfg.timing = timing;
            let result = driver::run(&cfg, RunOptions { keep_meshes: snapshots })?;
            let emitted = driver::emit_outputs(&result, &out, true)?;
            for r in &result.records {
                println!(
                    "step {:>3}  ndof {:>8}  energy {:+.12e}  iters {:>5}  err_total_sq {}",
                    r.step,
                    r.ndof,
                    r.energy,
                    r.iters,
                    r.err_total_sq.map_or("-".to_string(), |e| format!("{e:.4e}")),
                );
            }
            println!("wrote {}", emitted.csv.display());
            if let Some(e) = result.error {
                bail!("run aborted after {} steps: {e}", result.records.len());
            }
        }
    }
    Ok(())
}
