use fibrelab_geometry::{Direction, FibrationGeometry, ScalarField};
use nalgebra::{DMatrix, DVector};

use crate::scalar::{leafwise_ricci, transverse_ricci_scalar};
use crate::CurvatureError;

fn check_len(g: &FibrationGeometry, phi: &DVector<f64>) -> Result<(), CurvatureError> {
    let n2 = g.shape().1;
    if phi.len() != n2 {
        return Err(CurvatureError::ProfileLength { expected: n2, found: phi.len() });
    }
    Ok(())
}

/// Nodal matrix of `L_β φ = B⁻¹ D (B⁻¹ D (B D (B⁻¹ D φ)))` on base profiles,
/// `D = τ₂(1−τ₂)∂_{τ₂}` and `B = B₂₂`.
pub fn lichnerowicz_matrix(g: &FibrationGeometry) -> DMatrix<f64> {
    let base = g.grid().base();
    let p2 = g.chart().base_density();
    let d = DMatrix::from_diagonal(p2) * base.diff();
    let b = g.b22_profile();
    let inv = DMatrix::from_diagonal(&b.map(|v| 1.0 / v));
    let mul = DMatrix::from_diagonal(&b);
    &inv * &d * &inv * &d * mul * &d * inv * d
}

fn lich_profile(g: &FibrationGeometry, phi: &DVector<f64>) -> DVector<f64> {
    let ch = g.chart();
    let b = g.b22_profile();
    let u = b.component_mul(&ch.db(&ch.db(phi).component_div(&b)));
    ch.db(&ch.db(&u).component_div(&b)).component_div(&b)
}

pub fn lichnerowicz_transverse(
    g: &FibrationGeometry,
    phi: &DVector<f64>,
) -> Result<ScalarField, CurvatureError> {
    check_len(g, phi)?;
    Ok(ScalarField::base_only(&lich_profile(g, phi), g.shape().0))
}

fn lambda_rho_h(g: &FibrationGeometry) -> DMatrix<f64> {
    g.contract(&leafwise_ricci(g), Direction::Transverse).into_values()
}

/// Derivative of `Λ_β(Ric β + ρ_H)` along `β ↦ β + t i∂∂̄φ`:
/// `−L_βφ − (Λ_βρ_H)Δ_βφ + ½⟨∇S(β), ∇φ⟩_β`.
pub fn linearized_twisted(
    g: &FibrationGeometry,
    phi: &DVector<f64>,
) -> Result<ScalarField, CurvatureError> {
    check_len(g, phi)?;
    let ch = g.chart();
    let grid = g.grid();
    let b = g.b22_profile();
    let (_, s_beta) = transverse_ricci_scalar(g);
    let d_phi = ch.db(phi);
    let grad = (ch.db(&s_beta.base_profile()).component_mul(&d_phi) * 2.0).component_div(&b);
    let base = grad * 0.5 - lich_profile(g, phi);
    let lap = grid.tile_base(&g.transverse_laplacian_profile(phi));
    let out = grid.tile_base(&base) - lambda_rho_h(g).component_mul(&lap);
    Ok(ScalarField::total(out))
}

/// `Pφ = L_βφ − (Λ_βρ_H)Δ_βφ − ½⟨∇(Λ_βρ_H), ∇φ⟩_β`.
pub fn operator_p(g: &FibrationGeometry, phi: &DVector<f64>) -> Result<ScalarField, CurvatureError> {
    check_len(g, phi)?;
    let grid = g.grid();
    let lrh = lambda_rho_h(g);
    let lap = grid.tile_base(&g.transverse_laplacian_profile(phi));
    let grad = g.transverse_inner(&lrh, &grid.tile_base(phi));
    let out = grid.tile_base(&lich_profile(g, phi)) - lrh.component_mul(&lap) - grad * 0.5;
    Ok(ScalarField::total(out))
}

/// `(2π)² ∫ ρ_FH (D₁h_F)(D₂φ) ds₁ds₂`, the mixed-Ricci term paired with `Pφ`.
pub fn mixed_ricci_pairing(
    g: &FibrationGeometry,
    h_f: &ScalarField,
    phi: &DVector<f64>,
) -> Result<f64, CurvatureError> {
    check_len(g, phi)?;
    let ch = g.chart();
    let rho_fh = g.mixed_coefficient(&leafwise_ricci(g));
    let d2phi = g.grid().tile_base(&ch.db(phi));
    let density = rho_fh.component_mul(&ch.d1(h_f.values())).component_mul(&d2phi);
    Ok(g.integrate_density(&density))
}
