use fibrelab_curvature::{averages, leafwise_scalar, twisted_base_scalar};
use fibrelab_geometry::FibrationGeometry;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `sup |S_F − fibrewise ω-average of S_F|`.
    pub r_fibre: f64,
    /// `sup |Λ_β(Ric β + ρ_H) − Ŝ_π|`.
    pub r_base: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.r_fibre.max(self.r_base)
    }
}

/// Gauge-fixed update directions for `Φ` and `ψ`, alongside the residuals at
/// the same geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity {
    pub phi: DMatrix<f64>,
    pub psi: DVector<f64>,
    pub residuals: Residuals,
    pub energy: f64,
}

struct Defects {
    fibre: DMatrix<f64>,
    base: DMatrix<f64>,
}

fn defects(g: &FibrationGeometry) -> Defects {
    let grid = g.grid();
    let s_f = leafwise_scalar(g).into_values();
    let fibre = &s_f - grid.tile_base(&g.fibre_average(&s_f));
    let base = twisted_base_scalar(g).into_values().add_scalar(-averages(g).twisted);
    Defects { fibre, base }
}

fn energy_of(g: &FibrationGeometry, d: &Defects) -> f64 {
    g.integrate_omega_beta(&d.fibre.component_mul(&d.fibre))
        + g.integrate_omega_beta(&d.base.component_mul(&d.base))
}

pub fn residuals(g: &FibrationGeometry) -> Residuals {
    let d = defects(g);
    Residuals { r_fibre: d.fibre.amax(), r_base: d.base.amax() }
}

/// `∫(S_F − avg)² ω∧β + ∫(Λ_β(Ric β + ρ_H) − Ŝ_π)² ω∧β`.
pub fn energy(g: &FibrationGeometry) -> f64 {
    energy_of(g, &defects(g))
}

/// `Φ̇`: the fibre defect with its `dτ₁`-average removed on every fibre.
/// `ψ̇`: the fibrewise ω-average of the base defect, with zero `dτ₂`-average.
pub fn velocity(g: &FibrationGeometry) -> Velocity {
    let grid = g.grid();
    let d = defects(g);
    let phi = &d.fibre - grid.tile_base(&grid.fibre_quadrature(&d.fibre));
    let psi = g.fibre_average(&d.base);
    let psi = psi.add_scalar(-grid.base_quadrature(&psi));
    let residuals = Residuals { r_fibre: d.fibre.amax(), r_base: d.base.amax() };
    let energy = energy_of(g, &d);
    Velocity { phi, psi, residuals, energy }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fibrelab_geometry::{make_product_geometry, Grid};

    #[test]
    fn round_product_is_a_zero() {
        for kappa in [1.0, 2.5] {
            let grid = Grid::square(12).unwrap();
            let g = make_product_geometry(&grid, &DMatrix::zeros(12, 12), &DVector::zeros(12), kappa)
                .unwrap();
            let r = residuals(&g);
            assert!(r.max() < 1e-10, "{r:?}");
            assert!(energy(&g) < 1e-20);
        }
    }

    #[test]
    fn fibre_perturbation_couples_into_base() {
        let grid = Grid::square(16).unwrap();
        let phi = grid.sample(|a, b| 0.1 * (a * (1.0 - a)).powi(2) * b * (1.0 - b) * (1.0 + a));
        let g = make_product_geometry(&grid, &phi, &DVector::zeros(16), 1.0).unwrap();
        let r = residuals(&g);
        assert!(r.r_fibre > 1e-3 && r.r_base > 1e-5, "{r:?}");
        let v = velocity(&g);
        assert!(grid.fibre_quadrature(&v.phi).amax() < 1e-14);
        assert!(grid.base_quadrature(&v.psi).abs() < 1e-14);
    }
}
