use fibrelab_curvature::{
    averages, leafwise_ricci, leafwise_scalar, total_scalar_form, transverse_ricci_scalar,
    twisted_base_scalar, weil_petersson, Averages,
};
use fibrelab_geometry::{Direction, FibrationGeometry, TorusField, TwoForm};
use fibrelab_oracle::{toric_futaki_oracle, AffineFunction};

use crate::InvariantsError;

/// The three integrals of the transverse Futaki invariant, or the two of the
/// fibre-integral route (with `twist = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FutakiTerms {
    pub fibre: f64,
    pub base: f64,
    pub twist: f64,
}

impl FutakiTerms {
    pub fn total(&self) -> f64 {
        self.fibre + self.base + self.twist
    }
}

/// `∫h_F(S_F − Ŝ_F)ω∧β`, `∫h(Λ_β(Ric β + ρ) − λ)ω∧β` and
/// `½∫h(S_F − Ŝ_F)ω²`.
pub fn transverse_futaki_terms(g: &FibrationGeometry, v: &TorusField) -> FutakiTerms {
    let av = averages(g);
    let s_f = leafwise_scalar(g).into_values().add_scalar(-av.leafwise);
    let wb = g.w().wedge(g.b());
    let ww = g.w().wedge(g.w());
    let tw = twisted_base_scalar(g).into_values().add_scalar(-av.lambda);
    let h = v.h().values();
    FutakiTerms {
        fibre: g.integrate_density(&v.h_f().values().component_mul(&s_f).component_mul(&wb)),
        base: g.integrate_density(&h.component_mul(&tw).component_mul(&wb)),
        twist: 0.5 * g.integrate_density(&h.component_mul(&s_f).component_mul(&ww)),
    }
}

pub fn transverse_futaki(g: &FibrationGeometry, v: &TorusField) -> f64 {
    transverse_futaki_terms(g, v).total()
}

/// Fibre-integral route: `∫_B u β` with `u` the fibre integral of
/// `h_F(S_F − Ŝ_F)ω`, plus `A∫_B h(S(β) − Λ_β α_π/A − Ŝ_π)β`, `A` the fibre area.
pub fn submersion_futaki_terms(g: &FibrationGeometry, v: &TorusField) -> FutakiTerms {
    let Averages { leafwise, twisted, .. } = averages(g);
    let area = g.normalization().fibre_area;
    let b22 = g.b22_profile();

    let s_f = leafwise_scalar(g).into_values().add_scalar(-leafwise);
    let per_fibre =
        g.fibre_integrate_density(&v.h_f().values().component_mul(&s_f).component_mul(&g.w().c11));
    let fibre = g.integrate_base(&per_fibre);

    let (_, s_beta) = transverse_ricci_scalar(g);
    let alpha = weil_petersson(g).c22.row(0).transpose();
    let integrand = s_beta.base_profile() - alpha.component_div(&b22) / area;
    let h = v.h().base_profile();
    let base = area * g.integrate_base(&h.component_mul(&integrand.add_scalar(-twisted)));
    FutakiTerms { fibre, base, twist: 0.0 }
}

pub fn submersion_futaki(g: &FibrationGeometry, v: &TorusField) -> f64 {
    submersion_futaki_terms(g, v).total()
}

/// Pairing of the moment map for fibration-preserving Hamiltonians, using
/// `Λ_β(Ric β + ρ_H) − Ŝ_π` in the base integrand.
pub fn moment_pairing(g: &FibrationGeometry, v: &TorusField) -> f64 {
    let av = averages(g);
    let rho_h = g.split_form(&leafwise_ricci(g)).horizontal;
    let (ric, _) = transverse_ricci_scalar(g);
    let tw = g.contract(&ric.add(&rho_h), Direction::Transverse).into_values().add_scalar(-av.twisted);
    let s_f = leafwise_scalar(g).into_values().add_scalar(-av.leafwise);
    let wb = g.w().wedge(g.b());
    let ww = g.w().wedge(g.w());
    let h = v.h().values();
    let lead = v.h_f().values().component_mul(&s_f).component_mul(&wb);
    let base = h.component_mul(&tw).component_mul(&wb);
    let twist = h.component_mul(&s_f).component_mul(&ww) * 0.5;
    g.integrate_density(&(lead + base + twist))
}

/// `∫h_k(S(ω_k) − Ŝ_k)ω_k²` with `h_k = kh + h_F`.
pub fn classical_futaki(g: &FibrationGeometry, v: &TorusField, k: f64) -> Result<f64, InvariantsError> {
    let t = total_scalar_form(g, k)?;
    let vol = &t.det * 2.0;
    let s = t.scalar.values();
    let s_hat = g.integrate_density(&s.component_mul(&vol)) / g.integrate_density(&vol);
    let hk = v.h_k(k);
    Ok(g.integrate_density(&hk.values().component_mul(&s.add_scalar(-s_hat)).component_mul(&vol)))
}

/// Boundary-formula value of the classical Futaki invariant of a torus
/// generator for the class `[ω + kβ]`.
pub fn toric_classical_futaki(
    g: &FibrationGeometry,
    v: &TorusField,
    k: f64,
    c0: f64,
) -> Result<f64, InvariantsError> {
    let (a1, a2) = v.generator().ok_or(InvariantsError::NotAGenerator)?;
    let p = g.polytope(k)?;
    let f = AffineFunction::generator(i64::from(a1), i64::from(a2)).centred(&p);
    Ok(toric_futaki_oracle(&p, &f, c0)?)
}

/// `∫h(S_F − Ŝ_F)ω∧β`.
pub fn leading_term(g: &FibrationGeometry, v: &TorusField) -> Result<f64, InvariantsError> {
    let h = v.h().values();
    if h.amax() == 0.0 {
        return Err(InvariantsError::NoBaseComponent);
    }
    let s_f = leafwise_scalar(g).into_values().add_scalar(-averages(g).leafwise);
    Ok(g.integrate_density(&h.component_mul(&s_f).component_mul(&g.w().wedge(g.b()))))
}

/// `∫h Λ_β(α) ω∧β` for a base form `α`.
pub fn twisted_map_functional(
    g: &FibrationGeometry,
    v: &TorusField,
    alpha: &TwoForm,
) -> Result<f64, InvariantsError> {
    if alpha.shape() != g.shape() {
        return Err(InvariantsError::NotBaseForm);
    }
    if alpha.c11.amax() != 0.0 || alpha.c12.amax() != 0.0 {
        return Err(InvariantsError::NotBaseForm);
    }
    let lam = alpha.c22.component_div(&g.b().c22);
    let density = v.h().values().component_mul(&lam).component_mul(&g.w().wedge(g.b()));
    Ok(g.integrate_density(&density))
}
