use std::f64::consts::PI;
use std::sync::Arc;

use fibrelab_curvature::{averages, transverse_ricci_scalar, weil_petersson};
use fibrelab_geometry::{
    make_hirzebruch_geometry, make_product_geometry, potentials, FibrationGeometry, Grid,
    TorusField, TwoForm,
};
use fibrelab_invariants::*;
use fibrelab_oracle::{decay_ratios, AffineFunction, ToricOracle};
use nalgebra::{DMatrix, DVector};

fn phi_mixed(t1: f64, t2: f64) -> f64 {
    0.1 * t1 * (1.0 - t1) * (t2 * (1.0 - t2) * (t1 + 0.3) * (1.0 + t2) + 0.5 * t1 * t2 * t2)
}

fn psi_cubic(t: f64) -> f64 {
    0.2 * t * (1.0 - t) * (t + 0.5)
}

fn perturbed(n: usize, twist: u32, b: f64) -> FibrationGeometry {
    let grid = Grid::square(n).unwrap();
    let phi = grid.sample(phi_mixed);
    let psi = grid.sample_base(psi_cubic);
    if twist == 0 {
        make_product_geometry(&grid, &phi, &psi, 1.0).unwrap()
    } else {
        make_hirzebruch_geometry(&grid, twist, b, &phi, &psi, 1.0).unwrap()
    }
}

fn reference(n: usize, twist: u32, b: f64) -> FibrationGeometry {
    let grid = Grid::square(n).unwrap();
    let (phi, psi) = (DMatrix::zeros(n, n), DVector::zeros(n));
    if twist == 0 {
        make_product_geometry(&grid, &phi, &psi, 1.0).unwrap()
    } else {
        make_hirzebruch_geometry(&grid, twist, b, &phi, &psi, 1.0).unwrap()
    }
}

fn pair(g: &FibrationGeometry) -> TorusField {
    let grid: &Arc<Grid> = g.grid();
    let h_f = grid.sample(|a, b| a * a * b + (a + 2.0 * b).cos());
    let h = grid.sample_base(|t| t * t + 0.3 * (4.0 * t).sin());
    TorusField::custom(g, &h_f, &h).unwrap()
}

const GENS: [(i32, i32); 3] = [(1, 0), (0, 1), (1, 1)];

#[test]
fn routes_agree_for_generators_and_pairs() {
    for (a, b) in [(0, 0.0), (1, 2.0), (2, 0.5)] {
        let g = perturbed(48, a, b);
        let mut fields: Vec<TorusField> = GENS.iter().map(|&v| potentials(v, &g).unwrap()).collect();
        fields.push(pair(&g));
        for v in &fields {
            let t = transverse_futaki(&g, v);
            let s = submersion_futaki(&g, v);
            let p = moment_pairing(&g, v);
            assert!((t - s).abs() < 1e-6 && (t - p).abs() < 1e-6, "a={a}: {t} {s} {p}");
        }
        let t = transverse_futaki(&g, &fields[3]);
        assert!(t.abs() > 1e-3, "pair value {t}");
    }
}

#[test]
fn torus_generators_have_vanishing_transverse_value() {
    for (a, b) in [(0, 0.0), (1, 2.0)] {
        let g = perturbed(32, a, b);
        for gen in GENS {
            let v = potentials(gen, &g).unwrap();
            let terms = transverse_futaki_terms(&g, &v);
            assert!(terms.total().abs() < 1e-9, "{gen:?}: {terms:?}");
        }
        let terms = transverse_futaki_terms(&g, &potentials((0, 1), &g).unwrap());
        assert!(terms.fibre.abs() > 1e-5 && terms.base.abs() > 1e-5);
    }
}

#[test]
fn hirzebruch_reference_value_is_stable_under_refinement() {
    let values: Vec<f64> = [32, 48, 64]
        .iter()
        .map(|&n| {
            let g = reference(n, 1, 2.0);
            transverse_futaki(&g, &potentials((1, 0), &g).unwrap())
        })
        .collect();
    for w in values.windows(2) {
        assert!((w[0] - w[1]).abs() < 1e-9, "{values:?}");
    }
}

#[test]
fn round_product_everything_vanishes() {
    let g = reference(24, 0, 0.0);
    for gen in GENS {
        let v = potentials(gen, &g).unwrap();
        let rec = FutakiRecord::compute(&g, &v, &[4.0, 8.0]).unwrap();
        assert!(rec.transverse.abs() < 1e-10 && rec.submersion.abs() < 1e-10);
        assert!(rec.pairing.abs() < 1e-10 && rec.leading_term.abs() < 1e-10);
        assert!(rec.classical_k.iter().all(|(_, f)| f.abs() < 1e-9));
    }
}

#[test]
fn symmetric_product_base_generator_vanishes() {
    let n = 32;
    let grid = Grid::square(n).unwrap();
    let phi = grid.sample(|a, b| 0.1 * a * (1.0 - a) * (b * (1.0 - b)) * (1.0 + a));
    let psi = grid.sample_base(|t| 0.1 * (t * (1.0 - t)).powi(2));
    let g = make_product_geometry(&grid, &phi, &psi, 1.0).unwrap();
    let v = potentials((0, 1), &g).unwrap();
    assert!(transverse_futaki(&g, &v).abs() < 1e-10);
}

#[test]
fn classical_futaki_on_products_is_zero() {
    let g = perturbed(32, 0, 0.0);
    for gen in GENS {
        let v = potentials(gen, &g).unwrap();
        for k in [1.0, 8.0, 16.0] {
            assert!(classical_futaki(&g, &v, k).unwrap().abs() < 1e-8);
        }
    }
}

#[test]
fn classical_futaki_matches_calibrated_oracle() {
    let g = reference(48, 1, 2.0);
    for gen in [(1, 0), (0, 1)] {
        let v = potentials(gen, &g).unwrap();
        let p8 = g.polytope(8.0).unwrap();
        let f8 = AffineFunction::generator(i64::from(gen.0), i64::from(gen.1)).centred(&p8);
        let oracle = ToricOracle::calibrate(&p8, &f8, classical_futaki(&g, &v, 8.0).unwrap()).unwrap();
        assert!((oracle.constant() - 4.0 * PI * PI).abs() < 1e-6);
        let predicted = toric_classical_futaki(&g, &v, 16.0, oracle.constant()).unwrap();
        let observed = classical_futaki(&g, &v, 16.0).unwrap();
        assert!(observed.abs() > 1.0);
        assert!(((observed - predicted) / predicted).abs() < 1e-4, "{observed} vs {predicted}");
    }
}

#[test]
fn classical_futaki_is_class_invariant() {
    let base = reference(48, 1, 2.0);
    let moved = perturbed(48, 1, 2.0);
    let v0 = potentials((1, 1), &base).unwrap();
    let v1 = potentials((1, 1), &moved).unwrap();
    for k in [8.0, 16.0] {
        let a = classical_futaki(&base, &v0, k).unwrap();
        let b = classical_futaki(&moved, &v1, k).unwrap();
        assert!(((a - b) / a).abs() < 1e-6, "k={k}: {a} vs {b}");
    }
}

#[test]
fn leading_term_vanishes() {
    for (a, b) in [(0, 0.0), (1, 2.0)] {
        let g = perturbed(64, a, b);
        for gen in [(0, 1), (1, 1)] {
            let v = potentials(gen, &g).unwrap();
            assert!(leading_term(&g, &v).unwrap().abs() < 1e-6);
        }
        let v = pair(&g);
        assert!(leading_term(&g, &v).unwrap().abs() < 1e-6);
        let fibre_only = potentials((1, 0), &g).unwrap();
        assert_eq!(leading_term(&g, &fibre_only), Err(InvariantsError::NoBaseComponent));
    }
}

#[test]
fn adiabatic_differences_decay() {
    let g = reference(32, 1, 2.0);
    for gen in [(1, 0), (0, 1)] {
        let v = potentials(gen, &g).unwrap();
        let table = adiabatic_table(&g, &v, &[8.0, 16.0, 32.0]).unwrap();
        let order = table.order.unwrap();
        assert!(order <= -0.9, "{gen:?}: {order} {table:?}");
    }
    let g = perturbed(32, 0, 0.0);
    let table = adiabatic_table(&g, &potentials((0, 1), &g).unwrap(), &[8.0, 16.0, 32.0]).unwrap();
    assert!(table.rows.iter().all(|r| r.difference.abs() < 1e-8));
    assert_eq!(table.order, None);
}

#[test]
fn beta_class_invariance() {
    let g = perturbed(48, 1, 2.0);
    let phi = g.grid().sample_base(|t| (2.0 * t).cos() + t * t * t);
    for gen in GENS {
        let base = transverse_futaki(&g, &potentials(gen, &g).unwrap());
        for eps in [0.05, 0.1, 0.2] {
            let moved = g.shift_base(&(&phi * eps)).unwrap();
            let val = transverse_futaki(&moved, &potentials(gen, &moved).unwrap());
            assert!((val - base).abs() < 1e-6);
        }
    }
}

#[test]
fn twisted_map_functional_values() {
    let g = perturbed(48, 1, 2.0);
    let v = pair(&g);
    let (n1, n2) = g.shape();
    assert_eq!(twisted_map_functional(&g, &v, &TwoForm::zeros(n1, n2)).unwrap(), 0.0);
    assert!(twisted_map_functional(&g, &v, g.b()).unwrap().abs() < 1e-12);
    assert_eq!(
        twisted_map_functional(&g, &v, g.w()),
        Err(InvariantsError::NotBaseForm)
    );

    let alpha = weil_petersson(&g);
    let tmf = twisted_map_functional(&g, &v, &alpha).unwrap();
    let area = g.normalization().fibre_area;
    let (_, s_beta) = transverse_ricci_scalar(&g);
    let h = v.h().base_profile();
    let plain = area * g.integrate_base(&h.component_mul(&s_beta.base_profile().add_scalar(-averages(&g).twisted)));
    let base = submersion_futaki_terms(&g, &v).base;
    assert!((base - plain + tmf / area).abs() < 1e-10);
    assert!(tmf.abs() > 1e-6);
}

#[test]
fn route_gap_decays_spectrally() {
    let gaps: Vec<f64> = [16, 24, 32]
        .iter()
        .map(|&n| {
            let g = perturbed(n, 1, 2.0);
            FutakiRecord::compute(&g, &pair(&g), &[]).unwrap().route_gap()
        })
        .collect();
    assert!(gaps[2] < 1e-6, "{gaps:?}");
    assert!(decay_ratios(&gaps).iter().all(|r| *r > 4.0 || gaps[2] < 1e-12), "{gaps:?}");
}

#[test]
fn fingerprint_tracks_potentials() {
    let a = perturbed(16, 1, 2.0);
    let b = perturbed(16, 1, 2.0);
    let c = reference(16, 1, 2.0);
    assert_eq!(fingerprint(&a), fingerprint(&b));
    assert_ne!(fingerprint(&a), fingerprint(&c));
}
