use std::sync::Arc;

use fibrelab_curvature::*;
use fibrelab_geometry::{make_hirzebruch_geometry, make_product_geometry, FibrationGeometry, Grid};
use nalgebra::DVector;
use proptest::prelude::*;

fn geometry(grid: &Arc<Grid>, twist: u32, b: f64, c: &[f64; 4]) -> FibrationGeometry {
    let phi = grid.sample(|s, t| {
        let p = s * (1.0 - s);
        0.08 * p * (c[0] * (s - 0.5) * t + c[1] * t * t + c[2] * s * (1.0 - t))
    });
    let psi = grid.sample_base(|t| 0.1 * c[3] * t * t * (1.0 - t));
    if twist == 0 {
        make_product_geometry(grid, &phi, &psi, 1.0).unwrap()
    } else {
        make_hirzebruch_geometry(grid, twist, b, &phi, &psi, 1.0).unwrap()
    }
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
}

fn profile(grid: &Arc<Grid>, q: &[f64; 3]) -> DVector<f64> {
    grid.sample_base(|t| q[0] * t + q[1] * (3.0 * t).sin() + q[2] * t * t * t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lichnerowicz_self_adjoint(c in coeffs(), q in prop::array::uniform3(-1.0f64..1.0),
                                 r in prop::array::uniform3(-1.0f64..1.0), twist in 0u32..3) {
        let grid = Grid::square(32).unwrap();
        let g = geometry(&grid, twist, 1.0, &c);
        let (u, v) = (profile(&grid, &q), profile(&grid, &r));
        let lu = lichnerowicz_transverse(&g, &u).unwrap().base_profile();
        let lv = lichnerowicz_transverse(&g, &v).unwrap().base_profile();
        let lhs = g.integrate_base(&v.component_mul(&lu));
        let rhs = g.integrate_base(&u.component_mul(&lv));
        prop_assert!((lhs - rhs).abs() <= 1e-7 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn linearisation_agrees_with_fd(c in coeffs(), q in prop::array::uniform3(-1.0f64..1.0), twist in 0u32..2) {
        let grid = Grid::square(24).unwrap();
        let g = geometry(&grid, twist, 2.0, &c);
        let phi = profile(&grid, &q);
        let fd = |h: f64| {
            let plus = twisted_base_scalar(&g.shift_base(&(&phi * h)).unwrap()).into_values();
            let minus = twisted_base_scalar(&g.shift_base(&(&phi * -h)).unwrap()).into_values();
            (plus - minus) / (2.0 * h)
        };
        let extrapolated = (fd(5e-4) * 4.0 - fd(1e-3)) / 3.0;
        let lin = linearized_twisted(&g, &phi).unwrap().into_values();
        let err = (extrapolated - &lin).amax();
        prop_assert!(err < 1e-7 * (1.0 + lin.amax()), "err {} scale {}", err, lin.amax());
    }

    #[test]
    fn lambda_minus_twisted_average(c in coeffs(), twist in 0u32..3, b in -0.4f64..3.0) {
        let grid = Grid::square(20).unwrap();
        let g = geometry(&grid, twist, b, &c);
        let av = averages(&g);
        let w2 = g.integrate_density(&g.w().wedge(g.w()));
        prop_assert!((av.lambda - av.twisted - 0.5 * av.leafwise * w2 / g.volume()).abs() < 1e-9);
        prop_assert!((av.leafwise - 2.0).abs() < 1e-9);
    }

    #[test]
    fn average_total_matches_toric(c in coeffs(), twist in 0u32..3, k in 1.0f64..20.0) {
        let grid = Grid::square(28).unwrap();
        let g = geometry(&grid, twist, 1.0, &c);
        let direct = average_total(&g, k).unwrap();
        let toric = average_total_toric(&g, k).unwrap();
        prop_assert!((direct - toric).abs() < 1e-8, "{} vs {}", direct, toric);
    }

    #[test]
    fn leafwise_contraction_reproduces_scalar(c in coeffs(), twist in 0u32..3) {
        let grid = Grid::square(16).unwrap();
        let g = geometry(&grid, twist, 1.0, &c);
        let via = g.contract(&leafwise_ricci(&g), fibrelab_geometry::Direction::Leafwise);
        prop_assert!(via.max_abs_diff(&leafwise_scalar(&g)) < 1e-8);
    }
}
