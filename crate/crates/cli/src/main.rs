use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fibrelab::{run, run_all, CliError, Experiment, ExperimentConfig, ExperimentReport};

#[derive(Parser, Debug)]
#[command(name = "fibrelab", version, about = "Run curvature and Futaki experiments on fibred surfaces")]
struct Cli {
    /// TOML config; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root; each experiment writes into its own subdirectory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Working grid size.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Seed for the random perturbations and potentials.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress the verdict listing on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// One-shot invariants of the configured geometry.
    Compute,
    /// Transverse Futaki under random β-shifts along the grid ladder.
    InvarianceSweep,
    /// Fut_k/2k and the average total scalar curvature along ks.
    AdiabaticSweep,
    /// Pointwise 1/k expansion of the total scalar curvature.
    FineExpansion,
    /// Operator identities along the grid ladder.
    IdentitySuite,
    /// Run the geometric flow to convergence.
    Solve,
    /// Closed-form values on the round product.
    RoundBaseline,
    /// Every experiment in sequence plus a summary.
    VerifyAll,
}

fn experiment(c: Command) -> Option<Experiment> {
    Some(match c {
        Command::Compute => Experiment::Compute,
        Command::InvarianceSweep => Experiment::InvarianceSweep,
        Command::AdiabaticSweep => Experiment::AdiabaticSweep,
        Command::FineExpansion => Experiment::FineExpansion,
        Command::IdentitySuite => Experiment::IdentitySuite,
        Command::Solve => Experiment::Solve,
        Command::RoundBaseline => Experiment::RoundBaseline,
        Command::VerifyAll => return None,
    })
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    if let Some(n) = cli.grid {
        cfg.grid = n;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print(report: &ExperimentReport) {
    println!("{} ({:.2?})", report.experiment, report.elapsed);
    for v in &report.verdicts {
        let mark = if v.passed { "pass" } else { "FAIL" };
        println!("  {mark}  {:<28} {:>12.3e}  (threshold {:.1e})", v.name, v.value, v.threshold);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("fibrelab: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let result = match experiment(cli.command) {
        Some(e) => run(e, &cfg).map(|r| vec![r]),
        None => run_all(&cfg).map(|(summary, mut reports)| {
            reports.push(summary);
            reports
        }),
    };
    match result {
        Ok(reports) => {
            if !cli.quiet {
                reports.iter().for_each(print);
            }
            if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("fibrelab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
