use fibrelab_curvature::{
    average_total, average_total_toric, averages, fine_expansion_coefficient, leafwise_scalar,
    total_scalar, twisted_base_scalar,
};
use fibrelab_geometry::{potentials, Direction, FibrationGeometry};
use fibrelab_invariants::{adiabatic_table, transverse_futaki};
use fibrelab_oracle::central_difference;

use super::{gen_cells, gen_key};
use crate::config::ExperimentConfig;
use crate::report::{fit_slope, worst_decay, Cell, ExperimentReport, Table, Verdict};
use crate::setup::{geometry, random_geometry, random_potential};
use crate::CliError;

fn futaki_values(g: &FibrationGeometry, gens: &[(i32, i32)]) -> Result<Vec<f64>, CliError> {
    gens.iter().map(|gen| Ok(transverse_futaki(g, &potentials(*gen, g)?))).collect()
}

fn slope_verdict(report: &mut ExperimentReport, name: &str, points: &[(f64, f64)], cfg: &ExperimentConfig) {
    let tol = &cfg.tolerances;
    match fit_slope(points, tol.floor) {
        Some(s) => {
            report.metric(format!("{name}_slope"), s);
            report.verdict(Verdict::at_most(format!("{name}_slope"), s, tol.slope));
        }
        None => {
            // every defect is already at the floor
            report.metric(format!("{name}_slope"), f64::NEG_INFINITY);
            report.verdict(Verdict::at_most(format!("{name}_slope"), f64::NEG_INFINITY, tol.slope));
        }
    }
}

/// Change of the transverse Futaki invariant under `β ↦ β + εi∂∂̄φ` over
/// random geometries, random potentials and the refinement ladder.
pub fn invariance_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("invariance-sweep", cfg);
    let tol = &cfg.tolerances;
    let gens = &cfg.generators;
    let mut deltas = Table::new(
        "invariance",
        &["n", "sample", "potential", "a1", "a2", "eps", "futaki", "abs_delta"],
    );
    let mut derivs = Table::new("derivative", &["n", "sample", "potential", "a1", "a2", "derivative"]);
    let mut max_delta = Vec::new();
    let mut max_deriv = Vec::new();
    for &n in &cfg.grid_sizes {
        let (mut worst, mut worst_d): (f64, f64) = (0.0, 0.0);
        for s in 0..cfg.sweep.samples {
            let g = random_geometry(cfg, n, s)?;
            let base = futaki_values(&g, gens)?;
            for j in 0..cfg.sweep.potentials {
                let phi = random_potential(g.grid(), cfg.seed, j);
                for &eps in &cfg.eps {
                    let moved = g.shift_base(&(&phi * eps))?;
                    for (i, value) in futaki_values(&moved, gens)?.into_iter().enumerate() {
                        let delta = (value - base[i]).abs();
                        worst = worst.max(delta);
                        let [a1, a2] = gen_cells(Some(gens[i]));
                        deltas.push(vec![n.into(), s.into(), j.into(), a1, a2, eps.into(), value.into(), delta.into()]);
                    }
                }
                for gen in gens {
                    let d = central_difference(
                        |t| -> Result<f64, CliError> {
                            let moved = g.shift_base(&(&phi * t))?;
                            Ok(transverse_futaki(&moved, &potentials(*gen, &moved)?))
                        },
                        cfg.sweep.fd_step,
                    )
                    .map_err(|e| CliError::Experiment(e.to_string()))?;
                    worst_d = worst_d.max(d.abs());
                    let [a1, a2] = gen_cells(Some(*gen));
                    derivs.push(vec![n.into(), s.into(), j.into(), a1, a2, d.into()]);
                }
            }
        }
        report.metric(format!("max_abs_delta/n{n}"), worst);
        report.metric(format!("max_abs_derivative/n{n}"), worst_d);
        max_delta.push(worst);
        max_deriv.push(worst_d);
    }
    let finest = *max_delta.last().unwrap_or(&f64::NAN);
    let finest_d = *max_deriv.last().unwrap_or(&f64::NAN);
    report.verdict(Verdict::at_most("max_abs_delta", finest, tol.invariance));
    report.verdict(Verdict::at_most("max_abs_derivative", finest_d, tol.invariance));
    let decay = worst_decay(&max_delta, tol.decay_floor);
    report.metric("refinement_decay", decay);
    report.verdict(Verdict::at_least("refinement_decay", decay, tol.decay_ratio));
    report.table(deltas);
    report.table(derivs);
    Ok(report)
}

/// `Fut_k/2k` against the transverse invariant, and the expansion of the
/// average total scalar curvature, along `ks`.
pub fn adiabatic_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("adiabatic-sweep", cfg);
    let g = geometry(cfg, cfg.grid)?;
    let mut table = Table::new(
        "adiabatic",
        &["a1", "a2", "k", "classical", "scaled", "transverse", "difference"],
    );
    for gen in &cfg.generators {
        let v = potentials(*gen, &g)?;
        let t = adiabatic_table(&g, &v, &cfg.ks)?;
        let mut points = Vec::new();
        for r in &t.rows {
            let [a1, a2] = gen_cells(Some(*gen));
            table.push(vec![
                a1,
                a2,
                r.k.into(),
                (r.scaled * 2.0 * r.k).into(),
                r.scaled.into(),
                r.transverse.into(),
                r.difference.into(),
            ]);
            points.push((r.k, r.difference));
        }
        slope_verdict(&mut report, &format!("futaki/{}", gen_key(*gen)), &points, cfg);
    }

    let av = averages(&g);
    report.metric("average_leafwise", av.leafwise);
    report.metric("lambda", av.lambda);
    report.metric("average_twisted", av.twisted);
    let mut avg = Table::new(
        "averages",
        &["k", "average", "average_toric", "scaled", "defect_twisted", "defect_lambda"],
    );
    let (mut tw, mut lam) = (Vec::new(), Vec::new());
    for &k in &cfg.ks {
        let s_k = average_total(&g, k)?;
        let toric = average_total_toric(&g, k)?;
        let scaled = k * (s_k - av.leafwise);
        let (dt, dl) = ((scaled - av.twisted).abs(), (scaled - av.lambda).abs());
        avg.push(vec![k.into(), s_k.into(), toric.into(), scaled.into(), dt.into(), dl.into()]);
        tw.push((k, dt));
        lam.push((k, dl));
    }
    slope_verdict(&mut report, "average_expansion", &tw, cfg);
    report.metric(
        "average_expansion_lambda_slope",
        fit_slope(&lam, cfg.tolerances.floor).unwrap_or(f64::NEG_INFINITY),
    );
    report.table(table);
    report.table(avg);
    Ok(report)
}

/// Sup-norm defect of `k(S(ω_k) − S_F) − (S_tw − Δ_F Λ_β ω)` along `ks`; the
/// plus-sign variant is reported alongside.
pub fn fine_expansion(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("fine-expansion", cfg);
    let g = geometry(cfg, cfg.grid)?;
    let s_f = leafwise_scalar(&g).into_values();
    let coeff = fine_expansion_coefficient(&g).into_values();
    let tw = twisted_base_scalar(&g).into_values();
    let lam_w = g.contract(g.w(), Direction::Transverse);
    let lap = g.laplacian(&lam_w, Direction::Leafwise)?.into_values();
    let plus = &tw + &lap;
    let mut table = Table::new("fine", &["k", "sup_difference", "defect", "defect_plus_sign"]);
    let mut points = Vec::new();
    for &k in &cfg.ks {
        let diff = total_scalar(&g, k)?.into_values() - &s_f;
        let sup = diff.amax();
        let defect = (&diff * k - &coeff).amax();
        let plus_defect = (&diff * k - &plus).amax();
        table.push(vec![k.into(), sup.into(), defect.into(), Cell::Num(plus_defect)]);
        points.push((k, defect));
        report.metric(format!("defect/k{k}"), defect);
        report.metric(format!("defect_plus_sign/k{k}"), plus_defect);
    }
    slope_verdict(&mut report, "fine_expansion", &points, cfg);
    report.table(table);
    Ok(report)
}
