use fibrelab_geometry::FibrationGeometry;
use fibrelab_oracle::toric_average_scalar;
use num_traits::ToPrimitive;

use crate::scalar::{leafwise_ricci, total_scalar_form, transverse_ricci_scalar};
use crate::CurvatureError;

/// Global averages of a geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averages {
    /// `Ŝ_F = ∫ρ∧β / ∫ω∧β`.
    pub leafwise: f64,
    /// `λ = ∫(Ric β + ρ)∧ω / ∫ω∧β`.
    pub lambda: f64,
    /// `Ŝ_π = ∫_B (S(β) − Λ_β α_π/A)β / ∫_B β`, `A` the fibre area.
    pub twisted: f64,
}

pub fn averages(g: &FibrationGeometry) -> Averages {
    let v = g.volume();
    let rho = leafwise_ricci(g);
    let (ric, s_beta) = transverse_ricci_scalar(g);
    let leafwise = g.integrate_density(&rho.wedge(g.b())) / v;
    let lambda = g.integrate_density(&ric.add(&rho).wedge(g.w())) / v;

    let density = rho.wedge(g.w()) * -1.0 + g.w().wedge(g.w()) * (0.5 * leafwise);
    let alpha22 = g.fibre_integrate_density(&density);
    let area = g.normalization().fibre_area;
    let b22 = g.b22_profile();
    let field = s_beta.base_profile() - alpha22.component_div(&b22) / area;
    let ones = nalgebra::DVector::from_element(b22.len(), 1.0);
    let twisted = g.integrate_base(&field) / g.integrate_base(&ones);
    Averages { leafwise, lambda, twisted }
}

/// `∫S(ω_k) ω_k² / ∫ω_k²` from the exact scalar curvature.
pub fn average_total(g: &FibrationGeometry, k: f64) -> Result<f64, CurvatureError> {
    let t = total_scalar_form(g, k)?;
    let num = g.integrate_density(&t.scalar.values().component_mul(&t.det));
    let den = g.integrate_density(&t.det);
    Ok(num / den)
}

/// `Ŝ_k = |∂P_k| / |P_k|` from the moment polygon of `[ω + kβ]`.
pub fn average_total_toric(g: &FibrationGeometry, k: f64) -> Result<f64, CurvatureError> {
    let p = g.polytope(k)?;
    Ok(toric_average_scalar(&p).to_f64().unwrap_or(f64::NAN))
}
