use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sveuler::diagnostics::KernelKind;
use sveuler_cli::checks::{format_report, run_theory_checks, CheckSettings};
use sveuler_cli::config::load_config;
use sveuler_cli::extrapolate::extrapolate;
use sveuler_cli::run::{read_summary, run_experiment};
use sveuler_cli::{diagnose_snapshot, write_text};

#[derive(Parser)]
#[command(name = "sveuler", version, about = "Spectral viscosity ensembles for 2D incompressible Euler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Exact,
    Numerical,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 1 runs sequentially.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute structure function and spectrum of a stored snapshot.
    Diag {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "numerical")]
        kernel: KernelArg,
        /// Directory for the structure and spectrum CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extrapolate the relative energy dissipation from run summaries.
    Extrapolate {
        #[arg(long, num_args = 1.., required = true)]
        summaries: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the theory-check suite.
    TheoryCheck {
        #[arg(long, default_value_t = 10_000)]
        n_quad: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smaller field and sequence counts.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run { config, seed, workers, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(w) = workers {
                cfg.ensemble.workers = w;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let report = run_experiment(&cfg)?;
            println!(
                "{}: {} members ok, {} failed, dt {}, hash {}",
                report.out_dir.display(),
                report.completed,
                report.failed,
                report.dt,
                report.config_hash
            );
            for row in &report.summary {
                println!("t {} energy {} c_max {} d_max {} rel_ediss {}", row.t, row.mean_energy, row.c_max, row.d_max, row.rel_ediss);
            }
            if !report.within_failure_budget {
                eprintln!("too many failed members ({} of {})", report.failed, report.failed + report.completed);
                return Ok(ExitCode::from(2));
            }
        }
        Command::Diag { snapshot, alpha, lambda, kernel, out } => {
            let kernel = match kernel {
                KernelArg::Exact => KernelKind::Exact,
                KernelArg::Numerical => KernelKind::Numerical,
            };
            let d = diagnose_snapshot(&snapshot, alpha, lambda, kernel)?;
            println!("N {} t {} c_max {} d_max {}", d.n_modes, d.time, d.c_max, d.d_max);
            if let Some(dir) = out {
                write_text(&dir.join(format!("structure_t{}.csv", d.time)), &d.structure_csv)?;
                write_text(&dir.join(format!("spectrum_t{}.csv", d.time)), &d.spectrum_csv)?;
            }
        }
        Command::Extrapolate { summaries, out } => {
            let rows = summaries.iter().map(|p| read_summary(p)).collect::<Result<Vec<_>>>()?;
            let ex = extrapolate(&rows)?;
            let csv = ex.to_csv();
            match out {
                Some(p) => write_text(&p, &csv).context("writing extrapolation")?,
                None => print!("{csv}"),
            }
            eprintln!("reference initial energy {}", ex.e0_ref);
        }
        Command::TheoryCheck { n_quad, seed, quick } => {
            let mut s = if quick { CheckSettings::quick(seed) } else { CheckSettings::full(seed) };
            s.n_quad = n_quad;
            let lines = run_theory_checks(&s);
            print!("{}", format_report(&lines));
            if lines.iter().any(|l| !l.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
