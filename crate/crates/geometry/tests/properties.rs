use std::f64::consts::PI;
use std::sync::Arc;

use fibrelab_geometry::{
    make_hirzebruch_geometry, make_product_geometry, potentials, Chart, Direction,
    FibrationGeometry, Grid, Potential, ScalarField, TwoForm,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn geometry(grid: &Arc<Grid>, twist: u32, c: &[f64; 4]) -> FibrationGeometry {
    let phi = grid.sample(|a, b| {
        let p = a * (1.0 - a);
        0.08 * p * (c[0] * (a - 0.5) * b + c[1] * b * b + c[2] * a * (1.0 - b))
    });
    let psi = grid.sample_base(|t| 0.1 * c[3] * t * t * (1.0 - t));
    if twist == 0 {
        make_product_geometry(grid, &phi, &psi, 1.0).unwrap()
    } else {
        make_hirzebruch_geometry(grid, twist, 2.0, &phi, &psi, 1.0).unwrap()
    }
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn splitting_resums(c in coeffs(), e in prop::array::uniform3(-2.0f64..2.0), twist in 0u32..3) {
        let grid = Grid::square(10).unwrap();
        let g = geometry(&grid, twist, &c);
        let eta = TwoForm::new(
            grid.sample(|a, b| e[0] + a * b),
            grid.sample(|a, b| e[1] * a - b),
            grid.sample(|a, b| e[2] * b * b + a),
        );
        let s = g.split_form(&eta);
        let total = s.fibre.add(&s.horizontal).add(&s.mixed);
        prop_assert!(total.max_abs_diff(&eta) <= 1e-12);
        let full = g.contract(&eta, Direction::Transverse);
        let horizontal = g.contract(&s.horizontal, Direction::Transverse);
        prop_assert!(full.max_abs_diff(&horizontal) <= 1e-12);
        let mixed_only = s.mixed.add(&s.fibre);
        prop_assert!(g.contract(&mixed_only, Direction::Transverse).max_abs() <= 1e-12);
    }

    #[test]
    fn transverse_integration_by_parts(c in coeffs(), f in prop::array::uniform3(-1.0f64..1.0), twist in 0u32..3) {
        let n = 24;
        let grid = Grid::square(n).unwrap();
        let g = geometry(&grid, twist, &c);
        let fp = grid.sample_base(|t| f[0] * t * t + f[1] * (3.0 * t).sin());
        let gp = grid.sample_base(|t| (f[2] * t).exp() + t * t * t);
        let lap = g.laplacian(&ScalarField::base_only(&fp, n), Direction::Transverse).unwrap();
        let lhs = g.integrate_omega_beta(&grid.tile_base(&gp).component_mul(lap.values()));
        let inner = g.transverse_inner(&grid.tile_base(&fp), &grid.tile_base(&gp));
        let rhs = -0.5 * g.integrate_omega_beta(&inner);
        prop_assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn leafwise_laplacian_self_adjoint_on_fibres(c in coeffs(), twist in 0u32..3) {
        let n = 24;
        let grid = Grid::square(n).unwrap();
        let g = geometry(&grid, twist, &c);
        let u = ScalarField::total(grid.sample(|a, b| (2.0 * a + b).sin()));
        let v = ScalarField::total(grid.sample(|a, b| a * a * (1.0 + b)));
        let lu = g.laplacian(&u, Direction::Leafwise).unwrap();
        let lv = g.laplacian(&v, Direction::Leafwise).unwrap();
        let w = &g.w().c11;
        let left = g.fibre_integrate_density(&v.values().component_mul(lu.values()).component_mul(w));
        let right = g.fibre_integrate_density(&u.values().component_mul(lv.values()).component_mul(w));
        prop_assert!((left - right).amax() <= 1e-9);
    }

    #[test]
    fn shift_rule_for_transverse_potentials(c in coeffs(), d in -1.0f64..1.0, twist in 0u32..3) {
        let n = 20;
        let grid = Grid::square(n).unwrap();
        let g = geometry(&grid, twist, &c);
        let phi = grid.sample_base(|t| 0.1 * d * t * t * (1.0 - t) * (1.0 + t));
        let moved = g.shift_base(&phi).unwrap();
        for gen in [(0, 1), (1, 1), (2, -1)] {
            let v = potentials(gen, &g).unwrap();
            let direct = potentials(gen, &moved).unwrap();
            let rule = v.shifted_transverse(&moved, &phi).unwrap();
            prop_assert!(direct.h().max_abs_diff(&rule) <= 1e-12);
        }
    }

    #[test]
    fn base_generator_potential_is_centred(c in coeffs(), twist in 0u32..3) {
        let grid = Grid::square(16).unwrap();
        let g = geometry(&grid, twist, &c);
        let v = potentials((1, 2), &g).unwrap();
        prop_assert!(g.integrate_omega_beta(v.h().values()).abs() <= 1e-12);
        prop_assert!(g.integrate_omega_beta(v.h_f().values()).abs() <= 1e-12);
        let fibre = potentials((1, 0), &g).unwrap();
        prop_assert!(fibre.fibre_means(&g).amax() <= 1e-12);
    }
}

#[test]
fn hessian_mixed_partials_are_symmetric() {
    // closedness of an exact form: D₂η₁₁ = D₁η₁₂
    for twist in [0.0, 1.0, 2.0] {
        let mut last = f64::INFINITY;
        for n in [8, 16, 32] {
            let grid = Grid::square(n).unwrap();
            let ch = Chart::new(grid.clone(), twist);
            let f = grid.sample(|a, b| (a + 0.5 * b).exp() * (b - a * a));
            let h = ch.hessian_form(&f);
            let d = (ch.d2(&h.c11) - ch.d1(&h.c12)).amax();
            assert!(d <= 1e-9 || d < last / 4.0, "twist {twist} n {n} defect {d}");
            last = d;
        }
    }
}

#[test]
fn hessian_of_singular_potentials() {
    let n = 12;
    let grid = Grid::square(n).unwrap();
    let zero = DMatrix::zeros(n, n);
    for twist in [0.0, 2.0] {
        let ch = Chart::new(grid.clone(), twist);
        let fs = ch.hessian_of(&Potential { fibre_fs: 1.0, ..Potential::smooth(zero.clone()) });
        assert!((fs.c11.clone() - ch.p1()).amax() < 1e-15);
        let bil = ch.hessian_of(&Potential { bilinear: 1.0, ..Potential::smooth(zero.clone()) });
        assert!(bil.c12.iter().all(|v| *v == 1.0));
        assert!(bil.c11.amax() == 0.0 && bil.c22.amax() == 0.0);
    }
    // the untwisted fibre potential has no base components
    let ch = Chart::new(grid.clone(), 0.0);
    let fs = ch.hessian_of(&Potential { fibre_fs: 1.0, ..Potential::smooth(zero) });
    assert!(fs.c12.amax() == 0.0 && fs.c22.amax() == 0.0);
}

#[test]
fn constant_potential_has_zero_hessian() {
    let grid = Grid::square(12).unwrap();
    let ch = Chart::new(grid.clone(), 1.0);
    let h = ch.hessian_form(&DMatrix::from_element(12, 12, 4.2));
    assert!(h.c11.amax() < 1e-12 && h.c12.amax() < 1e-12 && h.c22.amax() < 1e-12);
}

#[test]
fn fibre_integral_of_fibre_hamiltonian_vanishes() {
    let grid = Grid::square(20).unwrap();
    let g = geometry(&grid, 1, &[0.3, -0.2, 0.5, 0.4]);
    let v = potentials((1, 0), &g).unwrap();
    let per = g.fibre_integrate_density(&v.h_f().values().component_mul(&g.w().c11));
    assert!(per.amax() < 1e-12);
    let vol = g.volume();
    assert!((vol - 4.0 * PI * PI).abs() < 1e-10, "{vol}");
    let _ = DVector::<f64>::zeros(1);
}
