mod identities;
mod invariants;
mod solver;
mod sweeps;

use std::time::Instant;

use crate::config::ExperimentConfig;
use crate::report::{Cell, ExperimentReport, Table, Verdict};
use crate::CliError;

pub use identities::identity_suite;
pub use invariants::{compute, round_baseline};
pub use solver::solve;
pub use sweeps::{adiabatic_sweep, fine_expansion, invariance_sweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Compute,
    InvarianceSweep,
    AdiabaticSweep,
    FineExpansion,
    IdentitySuite,
    Solve,
    RoundBaseline,
}

impl Experiment {
    /// Order used by `verify-all`.
    pub const ALL: [Experiment; 7] = [
        Experiment::RoundBaseline,
        Experiment::Compute,
        Experiment::InvarianceSweep,
        Experiment::AdiabaticSweep,
        Experiment::FineExpansion,
        Experiment::IdentitySuite,
        Experiment::Solve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Compute => "compute",
            Experiment::InvarianceSweep => "invariance-sweep",
            Experiment::AdiabaticSweep => "adiabatic-sweep",
            Experiment::FineExpansion => "fine-expansion",
            Experiment::IdentitySuite => "identity-suite",
            Experiment::Solve => "solve",
            Experiment::RoundBaseline => "round-baseline",
        }
    }

    pub fn run(self, cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
        let start = Instant::now();
        let mut report = match self {
            Experiment::Compute => compute(cfg),
            Experiment::InvarianceSweep => invariance_sweep(cfg),
            Experiment::AdiabaticSweep => adiabatic_sweep(cfg),
            Experiment::FineExpansion => fine_expansion(cfg),
            Experiment::IdentitySuite => identity_suite(cfg),
            Experiment::Solve => solve(cfg),
            Experiment::RoundBaseline => round_baseline(cfg),
        }?;
        report.elapsed = start.elapsed();
        Ok(report)
    }
}

/// Runs every experiment and collects the verdicts into a summary report
/// named `verify-all`.
pub fn verify_all(
    cfg: &ExperimentConfig,
) -> Result<(ExperimentReport, Vec<ExperimentReport>), CliError> {
    let start = Instant::now();
    let mut summary = ExperimentReport::new("verify-all", cfg);
    let mut table = Table::new("summary", &["experiment", "verdict", "passed", "value", "threshold"]);
    let mut reports = Vec::new();
    for e in Experiment::ALL {
        let r = e.run(cfg)?;
        for v in &r.verdicts {
            table.push(vec![
                e.name().into(),
                v.name.as_str().into(),
                Cell::Int(i64::from(v.passed)),
                v.value.into(),
                v.threshold.into(),
            ]);
            summary.verdict(Verdict { name: format!("{}/{}", e.name(), v.name), ..v.clone() });
        }
        summary.metric(format!("{}/verdicts", e.name()), r.verdicts.len() as f64);
        summary.metric(format!("{}/failed", e.name()), r.failures().len() as f64);
        reports.push(r);
    }
    summary.table(table);
    summary.elapsed = start.elapsed();
    Ok((summary, reports))
}

/// Generator label columns `a1, a2`; the Hamiltonian pair is `0, 0`.
pub(crate) fn gen_cells(gen: Option<(i32, i32)>) -> [Cell; 2] {
    let (a1, a2) = gen.unwrap_or((0, 0));
    [Cell::Int(i64::from(a1)), Cell::Int(i64::from(a2))]
}

pub(crate) fn gen_key(gen: (i32, i32)) -> String {
    format!("{}_{}", gen.0, gen.1)
}
