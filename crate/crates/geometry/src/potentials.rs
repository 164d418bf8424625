use nalgebra::{DMatrix, DVector};

use crate::field::ScalarField;
use crate::geometry::FibrationGeometry;
use crate::GeometryError;

/// Fibrewise and transverse Hamiltonians of a vector field commuting with the
/// fibration.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    generator: Option<(i32, i32)>,
    h_f: ScalarField,
    h: ScalarField,
}

fn centre(g: &FibrationGeometry, f: DMatrix<f64>) -> DMatrix<f64> {
    let mean = g.integrate_omega_beta(&f) / g.volume();
    f.add_scalar(-mean)
}

/// `κτ₂ + D₂ψ`, the β-moment coordinate of the base rotation.
pub fn base_moment(g: &FibrationGeometry) -> DVector<f64> {
    let ch = g.chart();
    let t2 = g.grid().base().nodes();
    t2 * g.kappa() + ch.db(g.psi())
}

/// `(D₁F, D₂F)` for the full ω-potential `F` (reference plus Φ).
pub fn fibre_moments(g: &FibrationGeometry) -> (DMatrix<f64>, DMatrix<f64>) {
    let ch = g.chart();
    let a = ch.twist();
    let b = g.provider().offset();
    let (t1, t2) = (ch.t1(), ch.t2());
    let m1 = t1 + ch.d1(g.phi());
    let m2 = t1.component_mul(t2) * a + t2 * b + ch.d2(g.phi());
    (m1, m2)
}

/// Hamiltonians of the torus generator `a₁∂_{θ₁} + a₂∂_{θ₂}`: `h` is centred
/// against ω∧β and so is `h_F`; for the fibre generator this makes every
/// fibrewise ω-average of `h_F` vanish.
pub fn potentials(gen: (i32, i32), g: &FibrationGeometry) -> Result<TorusField, GeometryError> {
    if gen == (0, 0) {
        return Err(GeometryError::ZeroGenerator);
    }
    let (a1, a2) = (f64::from(gen.0), f64::from(gen.1));
    let n1 = g.shape().0;
    let h_raw = g.grid().tile_base(&(base_moment(g) * a2));
    let h = centre(g, h_raw);
    let (m1, m2) = fibre_moments(g);
    let h_f = centre(g, m1 * a1 + m2 * a2);
    Ok(TorusField {
        generator: Some(gen),
        h_f: ScalarField::total(h_f),
        h: ScalarField::base_only(&h.row(0).transpose(), n1),
    })
}

impl TorusField {
    /// A general Hamiltonian pair: `h_F` is shifted to fibrewise ω-average
    /// zero and the base function `h` to ω∧β-average zero.
    pub fn custom(
        g: &FibrationGeometry,
        h_f: &DMatrix<f64>,
        h: &DVector<f64>,
    ) -> Result<Self, GeometryError> {
        let (n1, n2) = g.shape();
        if h_f.shape() != (n1, n2) || h.len() != n2 {
            return Err(GeometryError::Shape { expected: (n1, n2), found: h_f.shape() });
        }
        let means = g.fibre_average(h_f);
        let h_f = h_f - g.grid().tile_base(&means);
        let h = centre(g, g.grid().tile_base(h));
        Ok(Self {
            generator: None,
            h_f: ScalarField::total(h_f),
            h: ScalarField::base_only(&h.row(0).transpose(), n1),
        })
    }

    pub fn generator(&self) -> Option<(i32, i32)> {
        self.generator
    }

    pub fn h_f(&self) -> &ScalarField {
        &self.h_f
    }

    /// Transverse holomorphy potential, base-only.
    pub fn h(&self) -> &ScalarField {
        &self.h
    }

    /// `h_k = k·h + h_F`.
    pub fn h_k(&self, k: f64) -> ScalarField {
        ScalarField::total(self.h.values() * k + self.h_f.values())
    }

    /// Fibrewise ω-averages of `h_F`.
    pub fn fibre_means(&self, g: &FibrationGeometry) -> DVector<f64> {
        g.fibre_average(self.h_f.values())
    }

    /// Transverse potential after `β ↦ β + i∂∂̄φ`, by the rule `h + v(φ)`,
    /// re-centred on `shifted`.
    pub fn shifted_transverse(
        &self,
        shifted: &FibrationGeometry,
        phi: &DVector<f64>,
    ) -> Result<ScalarField, GeometryError> {
        let gen = self.generator.ok_or(GeometryError::ZeroGenerator)?;
        let v_phi = shifted.chart().db(phi) * f64::from(gen.1);
        let raw = shifted.grid().tile_base(&(self.h.base_profile() + v_phi));
        let h = centre(shifted, raw);
        Ok(ScalarField::base_only(&h.row(0).transpose(), shifted.shape().0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_product_geometry;
    use crate::grid::Grid;

    fn round(n: usize) -> FibrationGeometry {
        let g = Grid::square(n).unwrap();
        make_product_geometry(&g, &DMatrix::zeros(n, n), &DVector::zeros(n), 1.0).unwrap()
    }

    #[test]
    fn round_product_hamiltonians() {
        let g = round(12);
        let base = potentials((0, 1), &g).unwrap();
        let expect = g.grid().tau2().map(|t| t - 0.5);
        assert!((base.h().values() - &expect).amax() < 1e-13);
        let fibre = potentials((1, 0), &g).unwrap();
        let expect = g.grid().tau1().map(|t| t - 0.5);
        assert!((fibre.h_f().values() - expect).amax() < 1e-13);
        assert!(fibre.h().max_abs() < 1e-15);
        assert!(fibre.fibre_means(&g).amax() < 1e-13);
    }

    #[test]
    fn zero_generator_rejected() {
        assert_eq!(potentials((0, 0), &round(6)).unwrap_err(), GeometryError::ZeroGenerator);
    }

    #[test]
    fn combined_potential() {
        let g = round(8);
        let v = potentials((1, 1), &g).unwrap();
        let hk = v.h_k(3.0);
        let direct = v.h().values() * 3.0 + v.h_f().values();
        assert_eq!(hk.values(), &direct);
    }
}
