use fibrelab_curvature::{
    lichnerowicz_transverse, linearized_twisted, mixed_ricci_pairing, operator_p,
    twisted_base_scalar,
};
use fibrelab_geometry::{potentials, Direction, FibrationGeometry, ScalarField};
use fibrelab_invariants::leading_term;
use nalgebra::DMatrix;

use crate::config::ExperimentConfig;
use crate::report::{worst_decay, ExperimentReport, Table, Verdict};
use crate::setup::{geometry, hamiltonian_pair, test_potential};
use crate::CliError;

/// Step of the Richardson-extrapolated difference for the linearisation.
pub const LINEAR_STEP: f64 = 5e-3;
/// Step of the plain central difference reported alongside.
pub const PLAIN_STEP: f64 = 1e-4;
const SHIFT: f64 = 0.1;
const GENS: [(i32, i32); 3] = [(1, 0), (0, 1), (1, 1)];

pub const IDENTITIES: [&str; 8] = [
    "adjoint",
    "laplacian",
    "shift_rule",
    "linearisation",
    "linearisation_plain",
    "integral_identity",
    "lichnerowicz_kernel",
    "leading_term",
];

fn twisted_at(g: &FibrationGeometry, phi: &nalgebra::DVector<f64>, t: f64) -> Result<DMatrix<f64>, CliError> {
    Ok(twisted_base_scalar(&g.shift_base(&(phi * t))?).into_values())
}

fn central(g: &FibrationGeometry, phi: &nalgebra::DVector<f64>, h: f64) -> Result<DMatrix<f64>, CliError> {
    Ok((twisted_at(g, phi, h)? - twisted_at(g, phi, -h)?) / (2.0 * h))
}

/// Defects of every identity on one geometry, in the order of [`IDENTITIES`].
pub fn identity_defects(g: &FibrationGeometry) -> Result<Vec<f64>, CliError> {
    let grid = g.grid();
    let n1 = g.shape().0;
    let phi = test_potential(grid);

    // ∫ u Δ_β f ω∧β = −½ ∫ ⟨df, du⟩_β ω∧β
    let fp = grid.sample_base(|t| t * t + 0.3 * (3.0 * t).sin());
    let up = grid.sample_base(|t| (0.5 * t).exp() + t * t * t);
    let lap = g.laplacian(&ScalarField::base_only(&fp, n1), Direction::Transverse)?;
    let lhs = g.integrate_omega_beta(&grid.tile_base(&up).component_mul(lap.values()));
    let rhs = -0.5 * g.integrate_omega_beta(&g.transverse_inner(&grid.tile_base(&fp), &grid.tile_base(&up)));
    let adjoint = (lhs - rhs).abs();

    // Δ_β f = Λ_β i∂∂̄f
    let hess = g.chart().hessian_form(&grid.tile_base(&fp));
    let laplacian = (g.contract(&hess, Direction::Transverse).into_values() - lap.values()).amax();

    let moved = g.shift_base(&(&phi * SHIFT))?;
    let scaled = &phi * SHIFT;
    let mut shift_rule: f64 = 0.0;
    for gen in GENS {
        let direct = potentials(gen, &moved)?;
        let rule = potentials(gen, g)?.shifted_transverse(&moved, &scaled)?;
        shift_rule = shift_rule.max(direct.h().max_abs_diff(&rule));
    }

    let lin = linearized_twisted(g, &phi)?.into_values();
    let coarse = central(g, &phi, LINEAR_STEP)?;
    let fine = central(g, &phi, LINEAR_STEP / 2.0)?;
    let richardson = (fine * 4.0 - coarse) / 3.0;
    let linearisation = (&lin - richardson).amax();
    let linearisation_plain = (&lin - central(g, &phi, PLAIN_STEP)?).amax();

    // ∫ h P(φ) ω∧β + (mixed Ricci pairing) = 0
    let p = operator_p(g, &phi)?;
    let wb = g.w().wedge(g.b());
    let mut integral: f64 = 0.0;
    let mut kernel: f64 = 0.0;
    let mut leading: f64 = 0.0;
    for gen in GENS {
        let v = potentials(gen, g)?;
        let i = g.integrate_density(&p.values().component_mul(v.h().values()).component_mul(&wb));
        let j = mixed_ricci_pairing(g, v.h_f(), &phi)?;
        integral = integral.max((i + j).abs());
        if gen.1 != 0 {
            kernel = kernel.max(lichnerowicz_transverse(g, &v.h().base_profile())?.max_abs());
            leading = leading.max(leading_term(g, &v)?.abs());
        }
    }
    leading = leading.max(leading_term(g, &hamiltonian_pair(g)?)?.abs());

    Ok(vec![
        adjoint,
        laplacian,
        shift_rule,
        linearisation,
        linearisation_plain,
        integral,
        kernel,
        leading,
    ])
}

/// Every identity on the configured geometry along the refinement ladder,
/// with a bound at the finest grid and a decay check between grids.
pub fn identity_suite(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("identity-suite", cfg);
    let tol = &cfg.tolerances;
    let mut per_n = Vec::new();
    for &n in &cfg.grid_sizes {
        per_n.push(identity_defects(&geometry(cfg, n)?)?);
    }
    let mut table = Table::new("identities", &["identity", "n", "defect"]);
    for (i, name) in IDENTITIES.iter().enumerate() {
        let defects: Vec<f64> = per_n.iter().map(|d| d[i]).collect();
        for (n, d) in cfg.grid_sizes.iter().zip(&defects) {
            table.push(vec![(*name).into(), (*n).into(), (*d).into()]);
            report.metric(format!("{name}/n{n}"), *d);
        }
        let finest = *defects.last().unwrap_or(&f64::NAN);
        report.verdict(Verdict::at_most(*name, finest, tol.identity));
        if defects.len() > 1 && *name != "linearisation_plain" {
            let decay = worst_decay(&defects, tol.decay_floor);
            report.metric(format!("{name}/decay"), decay);
            report.verdict(Verdict::at_least(format!("{name}_decay"), decay, tol.decay_ratio));
        }
    }
    report.table(table);
    Ok(report)
}
