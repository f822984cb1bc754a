use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fraclab::lab::commands::{cmd_frequency, cmd_poly_critical, cmd_poly_gen, cmd_poly_verify, cmd_report, cmd_solve, cmd_stratify};
use fraclab::lab::{Check, ExperimentConfig};
use fraclab::LabError;

#[derive(Parser)]
#[command(name = "fraclab", version, about = "Weighted extension problems, frequency and stratification experiments")]
struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's [output] dir, else ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: the config's [run] threads, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured extension problem and write the dump and trace CSV.
    Solve,
    /// Model polynomials.
    Poly {
        #[command(subcommand)]
        op: PolyOp,
    },
    /// Frequency profiles, doubling and screens.
    Frequency,
    /// Singular set, strata, covers and the boundary split.
    Stratify,
    /// Aggregate the check files of a run directory.
    Report {
        /// Run directory (default: the output directory).
        dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PolyOp {
    /// Write the model member of degree k.
    Gen {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Number of variables; members are lifted when m > 2.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Write exact rational coefficients of the unnormalised shape.
        #[arg(long)]
        exact: bool,
    },
    /// Check the weighted identity for a polynomial file.
    Verify { file: PathBuf },
    /// Decide whether the degree-k member has an isolated critical point at the origin.
    Critical {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
    },
}

fn usage_error(e: &LabError) -> bool {
    matches!(e, LabError::Format(_) | LabError::Io(_) | LabError::InvalidParameter { .. })
}

fn fail(e: LabError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if usage_error(&e) { 2 } else { 1 })
}

fn finish(checks: &[Check]) -> ExitCode {
    for c in checks {
        println!("{}", c.line());
    }
    if checks.iter().all(|c| c.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(t) = cli.threads.or(cfg.threads) {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let result = match cli.command {
        Command::Solve => cmd_solve(&cfg, &out).map(|c| finish(&c)),
        Command::Frequency => cmd_frequency(&cfg, &out).map(|c| finish(&c)),
        Command::Stratify => cmd_stratify(&cfg, &out).map(|c| finish(&c)),
        Command::Report { dir } => {
            let dir = dir.unwrap_or(out);
            cmd_report(&dir).map(|(table, ok)| {
                print!("{table}");
                if ok {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            })
        }
        Command::Poly { op } => run_poly(op, &out),
    };
    result.unwrap_or_else(fail)
}

fn run_poly(op: PolyOp, out: &Path) -> fraclab::Result<ExitCode> {
    match op {
        PolyOp::Gen { k, a, m, exact } => {
            let path = cmd_poly_gen(k, a, m, exact, out)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        PolyOp::Verify { file } => {
            let c = cmd_poly_verify(&file)?;
            println!("{}", c.status());
            Ok(if c.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        PolyOp::Critical { k, a } => {
            let iso = cmd_poly_critical(k, a)?;
            println!("{}", if iso { "ISOLATED" } else { "NOT ISOLATED" });
            Ok(if iso { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
