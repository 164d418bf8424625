use fibrelab_geometry::{Direction, FibrationGeometry, ScalarField, TwoForm};
use nalgebra::{DMatrix, DVector};

use crate::averages::{averages, Averages};
use crate::CurvatureError;

/// `ρ = −Hess log W₁₁`, with the `log τ₁(1−τ₁)` part in closed form.
pub fn leafwise_ricci(g: &FibrationGeometry) -> TwoForm {
    let ch = g.chart();
    let smooth = ch.hessian_form(&g.w11_reduced().map(f64::ln));
    let mut rho = ch.log_p1_hessian().add(&smooth).scale(-1.0);
    rho.exact = true;
    rho
}

/// `S_F = −D₁² log W₁₁ / W₁₁`, evaluated as `(2 − ∂(p₁ ∂ log w̃))/w̃` so that
/// nothing singular is divided at the fibre poles.
pub fn leafwise_scalar(g: &FibrationGeometry) -> ScalarField {
    let ch = g.chart();
    let lw = g.w11_reduced().map(f64::ln);
    let inner = ch.p1().component_mul(&ch.partial1(&lw));
    let num = ch.partial1(&inner).map(|v| 2.0 - v);
    ScalarField::total(num.component_div(g.w11_reduced()))
}

/// `Ric β = −Hess log B₂₂` (base slot only) and `S(β) = Λ_β Ric β`.
pub fn transverse_ricci_scalar(g: &FibrationGeometry) -> (TwoForm, ScalarField) {
    let ch = g.chart();
    let base = g.grid().base();
    let lb = g.b22_reduced().map(f64::ln);
    let ric = ch.base_density() * 2.0 - ch.db(&ch.db(&lb));
    let inner = ch.base_density().component_mul(&(base.diff() * &lb));
    let s = (base.diff() * inner).map(|v| 2.0 - v).component_div(g.b22_reduced());
    let n1 = g.shape().0;
    let mut form = TwoForm::base(g.grid().tile_base(&ric));
    form.exact = true;
    (form, ScalarField::base_only(&s, n1))
}

/// `−∫_{X/B} ρ∧ω + (Ŝ_F/2)∫_{X/B} ω²`, a base form.
pub fn weil_petersson(g: &FibrationGeometry) -> TwoForm {
    let rho = leafwise_ricci(g);
    let s_f = averages(g).leafwise;
    let density = rho.wedge(g.w()) * -1.0 + g.w().wedge(g.w()) * (0.5 * s_f);
    TwoForm::base(g.grid().tile_base(&g.fibre_integrate_density(&density)))
}

/// `Λ_β(Ric β + ρ)` on the total space.
pub fn twisted_base_scalar(g: &FibrationGeometry) -> ScalarField {
    let (ric, _) = transverse_ricci_scalar(g);
    let rho = leafwise_ricci(g);
    g.contract(&ric.add(&rho), Direction::Transverse)
}

/// Fibrewise average of [`twisted_base_scalar`] rebuilt from base data:
/// `S(β) + A⁻¹(−Λ_β α_π − ½Λ_β ∫_{X/B}(S_F − Ŝ_F)ω²)` with `A` the fibre area.
pub fn twisted_base_scalar_fibre_path(g: &FibrationGeometry) -> DVector<f64> {
    let area = g.normalization().fibre_area;
    let (_, s_beta) = transverse_ricci_scalar(g);
    let alpha = weil_petersson(g);
    let b22 = g.b22_profile();
    let lam_alpha = alpha.c22.row(0).transpose().component_div(&b22);
    let s_f = leafwise_scalar(g);
    let s_hat = averages(g).leafwise;
    let defect = s_f.values().add_scalar(-s_hat).component_mul(&g.w().wedge(g.w()));
    let lam_corr = g.fibre_integrate_density(&defect).component_div(&b22);
    s_beta.base_profile() + (-lam_alpha - lam_corr * 0.5) / area
}

/// `S(β) + Λ_βρ − Δ_F(Λ_βω)`, the `1/k` coefficient of `S(ω + kβ)`.
pub fn fine_expansion_coefficient(g: &FibrationGeometry) -> ScalarField {
    let tw = twisted_base_scalar(g);
    let lam_w = g.contract(g.w(), Direction::Transverse);
    let lap = g.laplacian(&lam_w, Direction::Leafwise).expect("leafwise Laplacian is total");
    ScalarField::total(tw.values() - lap.values())
}

/// Scalar curvature of `ω_k` with the volume coefficient `det(W + kB)` used
/// for averages.
#[derive(Debug, Clone)]
pub struct TotalScalar {
    pub scalar: ScalarField,
    pub det: DMatrix<f64>,
}

fn min_eigenvalue(a: f64, b: f64, d: f64) -> f64 {
    let m = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    m - r
}

/// `S(ω_k) = tr(G⁻¹R)` with `G = W + kB` and `R = −Hess log det G`.
pub fn total_scalar_form(g: &FibrationGeometry, k: f64) -> Result<TotalScalar, CurvatureError> {
    let ch = g.chart();
    let w = g.w();
    let b22 = &g.b().c22;
    let hh = g.w_hh() + b22 * k;
    let reduced = hh.component_div(ch.p2());
    let (n1, n2) = g.shape();
    for j in 0..n2 {
        for i in 0..n1 {
            if !(reduced[(i, j)] > 0.0) {
                let ev = min_eigenvalue(w.c11[(i, j)], w.c12[(i, j)], w.c22[(i, j)] + k * b22[(i, j)]);
                return Err(CurvatureError::NotPositive { k, node: (i, j), min_eigenvalue: ev });
            }
        }
    }
    let rho = leafwise_ricci(g);
    let lq = ch.hessian_form(&reduced.map(f64::ln));
    let r11 = &rho.c11 - &lq.c11;
    let r12 = &rho.c12 - &lq.c12;
    let r22 = &rho.c22 + ch.p2() * 2.0 - &lq.c22;
    let g22 = &w.c22 + b22 * k;
    let det = w.c11.component_mul(&hh);
    let mut s = g22.component_mul(&r11);
    s -= 2.0 * w.c12.component_mul(&r12);
    s += w.c11.component_mul(&r22);
    let s = s.component_div(&det);
    Ok(TotalScalar { scalar: ScalarField::total(s), det })
}

pub fn total_scalar(g: &FibrationGeometry, k: f64) -> Result<ScalarField, CurvatureError> {
    Ok(total_scalar_form(g, k)?.scalar)
}

/// Every curvature quantity of a geometry, computed once.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub s_f: ScalarField,
    pub rho: TwoForm,
    pub ric_beta: TwoForm,
    pub s_beta: ScalarField,
    pub alpha_pi: TwoForm,
    pub twisted: ScalarField,
    pub constants: Averages,
}

impl CurvatureBundle {
    pub fn compute(g: &FibrationGeometry) -> Self {
        let (ric_beta, s_beta) = transverse_ricci_scalar(g);
        Self {
            s_f: leafwise_scalar(g),
            rho: leafwise_ricci(g),
            ric_beta,
            s_beta,
            alpha_pi: weil_petersson(g),
            twisted: twisted_base_scalar(g),
            constants: averages(g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fibrelab_geometry::{make_product_geometry, Grid};

    fn round(n: usize, kappa: f64) -> FibrationGeometry {
        let g = Grid::square(n).unwrap();
        make_product_geometry(&g, &DMatrix::zeros(n, n), &DVector::zeros(n), kappa).unwrap()
    }

    #[test]
    fn round_fibre_has_scalar_two() {
        let g = round(12, 1.0);
        assert!(leafwise_scalar(&g).values().iter().all(|v| (v - 2.0).abs() < 1e-12));
        let rho = leafwise_ricci(&g);
        assert!((&rho.c11 - &g.w().c11 * 2.0).amax() < 1e-12);
        assert!(rho.c12.amax() < 1e-12 && rho.c22.amax() < 1e-12);
    }

    #[test]
    fn scaled_base_scalar() {
        for kappa in [0.5, 1.0, 3.0] {
            let g = round(10, kappa);
            let (ric, s) = transverse_ricci_scalar(&g);
            assert!(s.is_base_only());
            assert!(s.values().iter().all(|v| (v - 2.0 / kappa).abs() < 1e-12));
            assert!(ric.c11.amax() == 0.0);
        }
    }

    #[test]
    fn round_total_scalar() {
        let g = round(12, 1.0);
        for k in [1.0, 4.0, 16.0] {
            let s = total_scalar(&g, k).unwrap();
            assert!(s.values().iter().all(|v| (v - (2.0 + 2.0 / k)).abs() < 1e-10), "k={k}");
        }
    }

    #[test]
    fn negative_k_breaks_positivity() {
        let g = round(8, 1.0);
        match total_scalar(&g, -2.0) {
            Err(CurvatureError::NotPositive { min_eigenvalue, .. }) => assert!(min_eigenvalue < 0.0),
            other => panic!("expected positivity error, got {other:?}"),
        }
    }

    #[test]
    fn round_product_twisted_and_wp() {
        let g = round(10, 1.0);
        assert!(weil_petersson(&g).c22.amax() < 1e-12);
        assert!(twisted_base_scalar(&g).values().iter().all(|v| (v - 2.0).abs() < 1e-12));
        let path = twisted_base_scalar_fibre_path(&g);
        assert!(path.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn bundle_matches_pieces() {
        let g = round(8, 2.0);
        let b = CurvatureBundle::compute(&g);
        assert_eq!(b.s_f, leafwise_scalar(&g));
        assert!((b.constants.twisted - 1.0).abs() < 1e-12);
    }
}
