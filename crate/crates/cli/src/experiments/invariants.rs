use std::f64::consts::PI;

use fibrelab_curvature::CurvatureBundle;
use fibrelab_geometry::{potentials, FibrationGeometry, Provider, TorusField};
use fibrelab_invariants::FutakiRecord;
use fibrelab_oracle::{closed_form_reference, AffineFunction, OracleError, ToricOracle};

use super::{gen_cells, gen_key};
use crate::config::ExperimentConfig;
use crate::report::{Cell, ExperimentReport, Table, Verdict};
use crate::setup::{geometry, hamiltonian_pair, round_product};
use crate::CliError;

/// Every closed-form value of the round product at the working grid size.
pub fn round_baseline(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("round-baseline", cfg);
    let g = round_product(cfg.grid)?;
    let reference = closed_form_reference("round_product")?;
    let want = |key: &str| {
        reference.constant(key).ok_or_else(|| OracleError::UnknownReference(key.to_string()))
    };
    let c = CurvatureBundle::compute(&g);

    let mut futaki: f64 = 0.0;
    for gen in &cfg.generators {
        let v = potentials(*gen, &g)?;
        let rec = FutakiRecord::compute(&g, &v, &cfg.ks)?;
        let classical = rec.classical_k.iter().map(|(_, f)| f.abs()).fold(0.0, f64::max);
        futaki = futaki
            .max(rec.transverse.abs())
            .max(rec.submersion.abs())
            .max(rec.pairing.abs())
            .max(rec.leading_term.abs())
            .max(classical);
    }
    let alpha = c.alpha_pi.c11.amax().max(c.alpha_pi.c12.amax()).max(c.alpha_pi.c22.amax());
    let sup_dev = |f: &nalgebra::DMatrix<f64>, x: f64| f.add_scalar(-x).amax();

    let rows: Vec<(&str, f64, f64)> = vec![
        ("leafwise_scalar", want("leafwise_scalar")?, sup_dev(c.s_f.values(), want("leafwise_scalar")?)),
        ("transverse_scalar", want("transverse_scalar")?, sup_dev(c.s_beta.values(), want("transverse_scalar")?)),
        ("twisted_scalar", want("average_twisted")?, sup_dev(c.twisted.values(), want("average_twisted")?)),
        ("lambda", want("lambda")?, (c.constants.lambda - want("lambda")?).abs()),
        ("average_twisted", want("average_twisted")?, (c.constants.twisted - want("average_twisted")?).abs()),
        ("average_leafwise", want("average_leafwise")?, (c.constants.leafwise - want("average_leafwise")?).abs()),
        ("weil_petersson", want("weil_petersson")?, alpha),
        ("futaki", want("futaki")?, futaki),
        ("volume", want("volume")?, (g.volume() - want("volume")?).abs()),
        ("fibre_area", want("fibre_area")?, (g.normalization().fibre_area - want("fibre_area")?).abs()),
    ];
    let mut table = Table::new("baseline", &["quantity", "reference", "max_abs_error"]);
    for (name, value, err) in rows {
        table.push(vec![name.into(), value.into(), err.into()]);
        report.metric(format!("{name}_error"), err);
        report.verdict(Verdict::at_most(name, err, cfg.tolerances.baseline));
    }
    report.table(table);
    Ok(report)
}

fn fields(cfg: &ExperimentConfig, g: &FibrationGeometry) -> Result<Vec<TorusField>, CliError> {
    let mut out = Vec::new();
    for gen in &cfg.generators {
        out.push(potentials(*gen, g)?);
    }
    out.push(hamiltonian_pair(g)?);
    Ok(out)
}

fn label(v: &TorusField) -> String {
    match v.generator() {
        Some(gen) => gen_key(gen),
        None => "pair".to_string(),
    }
}

/// One-shot invariants of the configured geometry: averages, the three
/// Futaki routes, the leading term and the classical invariants along `ks`.
pub fn compute(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let mut report = ExperimentReport::new("compute", cfg);
    let tol = &cfg.tolerances;
    let g = geometry(cfg, cfg.grid)?;
    let c = CurvatureBundle::compute(&g);
    report.metric("average_leafwise", c.constants.leafwise);
    report.metric("lambda", c.constants.lambda);
    report.metric("average_twisted", c.constants.twisted);
    report.metric("volume", g.volume());

    let mut futaki = Table::new(
        "futaki",
        &["field", "a1", "a2", "transverse", "submersion", "pairing", "leading_term", "route_gap"],
    );
    let mut classical = Table::new("classical", &["field", "a1", "a2", "k", "classical", "toric"]);
    let mut route_gap: f64 = 0.0;
    let mut leading: f64 = 0.0;
    let mut product_classical: f64 = 0.0;
    let mut oracle_error: f64 = 0.0;
    let mut oracle_checks = 0;
    let is_product = g.provider() == Provider::Product;

    for v in fields(cfg, &g)? {
        let name = label(&v);
        let rec = FutakiRecord::compute(&g, &v, &cfg.ks)?;
        let [a1, a2] = gen_cells(v.generator());
        futaki.push(vec![
            name.clone().into(),
            a1.clone(),
            a2.clone(),
            rec.transverse.into(),
            rec.submersion.into(),
            rec.pairing.into(),
            rec.leading_term.into(),
            rec.route_gap().into(),
        ]);
        report.metric(format!("transverse/{name}"), rec.transverse);
        report.metric(format!("submersion/{name}"), rec.submersion);
        report.metric(format!("pairing/{name}"), rec.pairing);
        report.metric(format!("leading_term/{name}"), rec.leading_term);
        route_gap = route_gap.max(rec.route_gap());
        leading = leading.max(rec.leading_term.abs());

        // the toric oracle is calibrated on the first k and predicts the rest
        let oracle = match v.generator() {
            Some((x, y)) if !is_product => {
                let (k0, f0) = rec.classical_k[0];
                let p = g.polytope(k0)?;
                let f = AffineFunction::generator(i64::from(x), i64::from(y)).centred(&p);
                match ToricOracle::calibrate(&p, &f, f0) {
                    Ok(o) => Some(o),
                    Err(OracleError::ZeroCalibration) => None,
                    Err(e) => return Err(e.into()),
                }
            }
            _ => None,
        };
        if let Some(o) = &oracle {
            report.metric(format!("oracle_constant/{name}"), o.constant());
        }
        for (i, &(k, value)) in rec.classical_k.iter().enumerate() {
            let toric = match (&oracle, v.generator()) {
                (Some(o), Some((x, y))) => {
                    let p = g.polytope(k)?;
                    o.predict(&p, &AffineFunction::generator(i64::from(x), i64::from(y)).centred(&p))?
                }
                _ => f64::NAN,
            };
            if i > 0 && toric.is_finite() {
                oracle_error = oracle_error.max(((value - toric) / toric).abs());
                oracle_checks += 1;
            }
            if is_product && v.generator().is_some() {
                product_classical = product_classical.max(value.abs());
            }
            classical.push(vec![name.clone().into(), a1.clone(), a2.clone(), k.into(), value.into(), Cell::Num(toric)]);
        }
    }
    report.metric("route_gap", route_gap);
    report.metric("leading_term", leading);
    report.verdict(Verdict::at_most("route_gap", route_gap, tol.route));
    report.verdict(Verdict::at_most("leading_term", leading, tol.leading));
    if is_product {
        report.metric("product_classical", product_classical);
        report.verdict(Verdict::at_most("product_classical", product_classical, tol.product_zero));
    } else if oracle_checks > 0 {
        report.metric("oracle_relative_error", oracle_error);
        report.metric("oracle_reference_constant", 4.0 * PI * PI);
        report.verdict(Verdict::at_most("oracle_relative_error", oracle_error, tol.oracle));
    }
    report.table(futaki);
    report.table(classical);
    Ok(report)
}
