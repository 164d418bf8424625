use std::f64::consts::PI;
use std::sync::Arc;

use fibrelab_oracle::PolytopeData;
use nalgebra::{DMatrix, DVector};

use crate::chart::{Chart, Potential};
use crate::field::{ScalarField, TwoForm};
use crate::grid::Grid;
use crate::GeometryError;

/// Testbed fibration `X → P¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provider {
    /// `P¹ × P¹` with the round fibre form as reference.
    Product,
    /// Hirzebruch surface `P(O ⊕ O(twist))` with reference horizontal offset
    /// `b`; twist zero is the trivial bundle.
    Hirzebruch { twist: u32, b: f64 },
}

impl Provider {
    pub fn twist(&self) -> u32 {
        match self {
            Provider::Product => 0,
            Provider::Hirzebruch { twist, .. } => *twist,
        }
    }

    pub fn offset(&self) -> f64 {
        match self {
            Provider::Product => 0.0,
            Provider::Hirzebruch { b, .. } => *b,
        }
    }
}

/// Area conventions of a geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub fibre_area: f64,
    pub base_area: f64,
    pub kappa: f64,
}

/// Leafwise (`Leafwise`) or transverse (`Transverse`) operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Transverse,
    Leafwise,
}

/// The three types of a two-form relative to the splitting defined by ω.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub fibre: TwoForm,
    pub horizontal: TwoForm,
    pub mixed: TwoForm,
}

/// Volume form paired with a scalar density before integration.
#[derive(Debug, Clone)]
pub enum Weight {
    OmegaBeta,
    OmegaSquared,
    OmegaK(f64),
    Custom(TwoForm, TwoForm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Fibre,
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Integral {
    Number(f64),
    /// Fibre integral written as `u·β`; `∫_X f·weight = ∫_B u β`.
    Base(DVector<f64>),
}

impl Integral {
    pub fn number(&self) -> Option<f64> {
        match self {
            Integral::Number(x) => Some(*x),
            Integral::Base(_) => None,
        }
    }

    pub fn base(&self) -> Option<&DVector<f64>> {
        match self {
            Integral::Base(v) => Some(v),
            Integral::Number(_) => None,
        }
    }
}

/// A leafwise-Kähler form ω and a transverse Kähler form β on a testbed, with
/// the splitting data they induce.
#[derive(Debug, Clone)]
pub struct FibrationGeometry {
    chart: Chart,
    provider: Provider,
    kappa: f64,
    phi: DMatrix<f64>,
    psi: DVector<f64>,
    w: TwoForm,
    b: TwoForm,
    w11_reduced: DMatrix<f64>,
    b22_reduced: DVector<f64>,
    c: DMatrix<f64>,
    w_hh: DMatrix<f64>,
}

/// `ω = FS_fibre + i∂∂̄Φ`, `β = κ·FS_base + i∂∂̄ψ` on `P¹ × P¹`.
pub fn make_product_geometry(
    grid: &Arc<Grid>,
    phi: &DMatrix<f64>,
    psi: &DVector<f64>,
    kappa: f64,
) -> Result<FibrationGeometry, GeometryError> {
    FibrationGeometry::build(grid, Provider::Product, kappa, phi.clone(), psi.clone())
}

/// Hirzebruch surface of positive twist `a` with horizontal offset `b`.
pub fn make_hirzebruch_geometry(
    grid: &Arc<Grid>,
    a: u32,
    b: f64,
    phi: &DMatrix<f64>,
    psi: &DVector<f64>,
    kappa: f64,
) -> Result<FibrationGeometry, GeometryError> {
    if a == 0 {
        return Err(GeometryError::BadParameter("Hirzebruch twist must be positive".into()));
    }
    FibrationGeometry::build(grid, Provider::Hirzebruch { twist: a, b }, kappa, phi.clone(), psi.clone())
}

impl FibrationGeometry {
    /// Assembles and validates a geometry from nodal potentials.
    pub fn build(
        grid: &Arc<Grid>,
        provider: Provider,
        kappa: f64,
        phi: DMatrix<f64>,
        psi: DVector<f64>,
    ) -> Result<Self, GeometryError> {
        let (n1, n2) = grid.shape();
        if phi.shape() != (n1, n2) || psi.len() != n2 {
            return Err(GeometryError::Shape {
                expected: (n1, n2),
                found: (phi.nrows(), phi.ncols()),
            });
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(GeometryError::BadParameter(format!("kappa must be positive, got {kappa}")));
        }
        let b_off = provider.offset();
        if !b_off.is_finite() || b_off <= -kappa {
            return Err(GeometryError::BadParameter(format!(
                "horizontal offset {b_off} leaves ω + β degenerate"
            )));
        }
        if phi.iter().chain(psi.iter()).any(|v| !v.is_finite()) {
            return Err(GeometryError::BadParameter("non-finite potential data".into()));
        }

        let a = f64::from(provider.twist());
        let chart = Chart::new(grid.clone(), a);
        let p1 = chart.p1();

        // W₁₁/p₁ = 1 + ∂(p₁∂Φ), so that W₁₁ = p₁ + D₁D₁Φ holds on the grid
        let w11_reduced = chart.partial1(&p1.component_mul(&chart.partial1(&phi))).add_scalar(1.0);
        if let Some((i, j, v)) = first_nonpositive(&w11_reduced) {
            return Err(GeometryError::Positivity { what: "W11", node: (i, j), value: v });
        }

        let base = grid.base();
        let b22_reduced =
            (base.diff() * chart.base_density().component_mul(&(base.diff() * &psi))).add_scalar(kappa);
        if let Some(j) = b22_reduced.iter().position(|v| !(*v > 0.0)) {
            return Err(GeometryError::Positivity {
                what: "B22",
                node: (0, j),
                value: b22_reduced[j],
            });
        }

        let reference = Potential { fibre_fs: 1.0, base_fs: b_off, bilinear: 0.0, smooth: phi };
        let h = chart.hessian_of(&reference);
        let phi = reference.smooth;
        let w11 = p1.component_mul(&w11_reduced);
        let (w12, w22) = (h.c12, h.c22);
        let c = w12.component_div(&w11);
        let w_hh = &w22 - c.component_mul(&w12);
        let mut w = TwoForm::new(w11, w12, w22);
        w.exact = true;

        let b22 = DMatrix::from_fn(n1, n2, |_, j| base.nodes()[j] * (1.0 - base.nodes()[j]) * b22_reduced[j]);
        let mut b = TwoForm::base(b22);
        b.exact = true;

        Ok(Self { chart, provider, kappa, phi, psi, w, b, w11_reduced, b22_reduced, c, w_hh })
    }

    /// The geometry with potentials `(Φ + δΦ, ψ + δψ)`.
    pub fn shift(&self, d_phi: &DMatrix<f64>, d_psi: &DVector<f64>) -> Result<Self, GeometryError> {
        Self::build(self.grid(), self.provider, self.kappa, &self.phi + d_phi, &self.psi + d_psi)
    }

    pub fn shift_base(&self, d_psi: &DVector<f64>) -> Result<Self, GeometryError> {
        let (n1, n2) = self.shape();
        self.shift(&DMatrix::zeros(n1, n2), d_psi)
    }

    pub fn shift_fibre(&self, d_phi: &DMatrix<f64>) -> Result<Self, GeometryError> {
        self.shift(d_phi, &DVector::zeros(self.shape().1))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.chart.grid()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.grid().shape()
    }

    pub fn provider(&self) -> Provider {
        self.provider
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn normalization(&self) -> Normalization {
        Normalization { fibre_area: 2.0 * PI, base_area: 2.0 * PI * self.kappa, kappa: self.kappa }
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn psi(&self) -> &DVector<f64> {
        &self.psi
    }

    /// Components of ω.
    pub fn w(&self) -> &TwoForm {
        &self.w
    }

    /// Components of β; only the base-base slot is nonzero.
    pub fn b(&self) -> &TwoForm {
        &self.b
    }

    /// `W₁₁ / τ₁(1−τ₁)`, smooth and positive.
    pub fn w11_reduced(&self) -> &DMatrix<f64> {
        &self.w11_reduced
    }

    /// `B₂₂ / τ₂(1−τ₂)` as a base profile.
    pub fn b22_reduced(&self) -> &DVector<f64> {
        &self.b22_reduced
    }

    /// `B₂₂` as a base profile.
    pub fn b22_profile(&self) -> DVector<f64> {
        self.chart.base_density().component_mul(&self.b22_reduced)
    }

    /// Horizontal lift coefficient `c = W₁₂/W₁₁`.
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn c_field(&self) -> ScalarField {
        ScalarField::total(self.c.clone())
    }

    /// `W₂₂ − W₁₂²/W₁₁`, the horizontal coefficient of ω.
    pub fn w_hh(&self) -> &DMatrix<f64> {
        &self.w_hh
    }

    /// `ω + kβ`.
    pub fn omega_k(&self, k: f64) -> TwoForm {
        self.w.add(&self.b.scale(k))
    }

    /// Moment polygon of `[ω + kβ]`.
    pub fn polytope(&self, k: f64) -> Result<PolytopeData, GeometryError> {
        PolytopeData::for_class(self.provider.twist(), self.provider.offset(), self.kappa, k)
            .map_err(|e| GeometryError::BadParameter(e.to_string()))
    }

    /// `η_HH = η₂₂ − 2cη₁₂ + c²η₁₁`.
    pub fn horizontal_coefficient(&self, eta: &TwoForm) -> DMatrix<f64> {
        let c = &self.c;
        let mut out = eta.c22.clone();
        out -= 2.0 * c.component_mul(&eta.c12);
        out += c.component_mul(c).component_mul(&eta.c11);
        out
    }

    /// `η_FH = η₁₂ − cη₁₁`.
    pub fn mixed_coefficient(&self, eta: &TwoForm) -> DMatrix<f64> {
        &eta.c12 - self.c.component_mul(&eta.c11)
    }

    pub fn split_form(&self, eta: &TwoForm) -> Split {
        let c = &self.c;
        let fibre = TwoForm::new(
            eta.c11.clone(),
            c.component_mul(&eta.c11),
            c.component_mul(c).component_mul(&eta.c11),
        );
        let hh = self.horizontal_coefficient(eta);
        let horizontal = TwoForm::base(hh);
        let fh = self.mixed_coefficient(eta);
        let (n1, n2) = self.shape();
        let mixed = TwoForm::new(DMatrix::zeros(n1, n2), fh.clone(), 2.0 * c.component_mul(&fh));
        Split { fibre, horizontal, mixed }
    }

    /// `Λ_β η = η_HH/B₂₂` or `Λ^V η = η₁₁/W₁₁`.
    pub fn contract(&self, eta: &TwoForm, which: Direction) -> ScalarField {
        match which {
            Direction::Transverse => {
                ScalarField::total(self.horizontal_coefficient(eta).component_div(&self.b.c22))
            }
            Direction::Leafwise => ScalarField::total(eta.c11.component_div(&self.w.c11)),
        }
    }

    pub fn laplacian(&self, f: &ScalarField, which: Direction) -> Result<ScalarField, GeometryError> {
        match which {
            Direction::Transverse => {
                if !f.is_base_only() {
                    return Err(GeometryError::NotBaseOnly);
                }
                Ok(ScalarField::base_only(
                    &self.transverse_laplacian_profile(&f.base_profile()),
                    self.shape().0,
                ))
            }
            Direction::Leafwise => {
                let d = self.chart.d1(&self.chart.d1(f.values()));
                Ok(ScalarField::total(d.component_div(&self.w.c11)))
            }
        }
    }

    /// `D₂²φ / B₂₂` of a base profile.
    pub fn transverse_laplacian_profile(&self, phi: &DVector<f64>) -> DVector<f64> {
        let ch = &self.chart;
        ch.db(&ch.db(phi)).component_div(&self.b22_profile())
    }

    /// `⟨df, dg⟩_β = 2 (e_H f)(e_H g)/B₂₂` with `e_H = D₂ − c D₁`.
    pub fn transverse_inner(&self, f: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
        let ef = self.horizontal_derivative(f);
        let eg = self.horizontal_derivative(g);
        (ef.component_mul(&eg) * 2.0).component_div(&self.b.c22)
    }

    pub fn horizontal_derivative(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        self.chart.d2(f) - self.c.component_mul(&self.chart.d1(f))
    }

    /// `(2π)² ∫∫ density ds₁ds₂`, density being a wedge coefficient.
    pub fn integrate_density(&self, density: &DMatrix<f64>) -> f64 {
        let m = density.component_div(&self.chart.p1().component_mul(self.chart.p2()));
        4.0 * PI * PI * self.grid().quadrature(&m)
    }

    /// `2π ∫ density ds₁` per base node.
    pub fn fibre_integrate_density(&self, density: &DMatrix<f64>) -> DVector<f64> {
        let m = density.component_div(self.chart.p1());
        self.grid().fibre_quadrature(&m) * (2.0 * PI)
    }

    /// `∫_B u β`.
    pub fn integrate_base(&self, u: &DVector<f64>) -> f64 {
        2.0 * PI * self.grid().base_quadrature(&u.component_mul(&self.b22_reduced))
    }

    /// Wedge coefficient of the chosen weight.
    pub fn weight_density(&self, weight: &Weight) -> DMatrix<f64> {
        match weight {
            Weight::OmegaBeta => self.w.wedge(&self.b),
            Weight::OmegaSquared => self.w.wedge(&self.w),
            Weight::OmegaK(k) => {
                let wk = self.omega_k(*k);
                wk.wedge(&wk)
            }
            Weight::Custom(eta, xi) => eta.wedge(xi),
        }
    }

    pub fn integrate(&self, f: &ScalarField, weight: &Weight, domain: Domain) -> Integral {
        let density = f.values().component_mul(&self.weight_density(weight));
        match domain {
            Domain::Global => Integral::Number(self.integrate_density(&density)),
            Domain::Fibre => {
                let per = self.fibre_integrate_density(&density);
                Integral::Base(per.component_div(&self.b22_profile()))
            }
        }
    }

    /// `∫_X f ω∧β`.
    pub fn integrate_omega_beta(&self, f: &DMatrix<f64>) -> f64 {
        self.integrate_density(&f.component_mul(&self.w.wedge(&self.b)))
    }

    /// `∫_X ω∧β`.
    pub fn volume(&self) -> f64 {
        self.integrate_density(&self.w.wedge(&self.b))
    }

    /// Fibrewise ω-average of a field, per base node.
    pub fn fibre_average(&self, f: &DMatrix<f64>) -> DVector<f64> {
        let num = self.grid().fibre_quadrature(&f.component_mul(&self.w11_reduced));
        let den = self.grid().fibre_quadrature(&self.w11_reduced);
        num.component_div(&den)
    }
}

fn first_nonpositive(m: &DMatrix<f64>) -> Option<(usize, usize, f64)> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !(v > 0.0) {
                return Some((i, j, v));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(n: usize) -> FibrationGeometry {
        let g = Grid::square(n).unwrap();
        make_product_geometry(&g, &DMatrix::zeros(n, n), &DVector::zeros(n), 1.0).unwrap()
    }

    #[test]
    fn round_product_components() {
        let g = round(12);
        let ch = g.chart();
        assert!((g.w().c11.clone() - ch.p1()).amax() < 1e-15);
        assert!(g.w().c12.amax() < 1e-15);
        assert!(g.w().c22.amax() < 1e-15);
        assert!((g.b().c22.clone() - ch.p2()).amax() < 1e-15);
    }

    #[test]
    fn midpoint_fibre_density() {
        // odd node count puts a node at τ₁ = 1/2
        let g = round(13);
        assert!((g.w().c11[(6, 3)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn strongly_concave_potential_rejected() {
        let grid = Grid::square(10).unwrap();
        let phi = grid.sample(|t, _| -10.0 * t * t);
        let err = make_product_geometry(&grid, &phi, &DVector::zeros(10), 1.0).unwrap_err();
        assert!(matches!(err, GeometryError::Positivity { what: "W11", .. }));
    }

    #[test]
    fn hirzebruch_reference_is_leafwise_and_transverse_kahler() {
        let grid = Grid::square(16).unwrap();
        let g = make_hirzebruch_geometry(&grid, 1, 2.0, &DMatrix::zeros(16, 16), &DVector::zeros(16), 1.0)
            .unwrap();
        assert!(g.w().c11.min() > 0.0);
        assert!(g.b().c22.min() > 0.0);
        let p = g.polytope(1.0).unwrap();
        assert_eq!(p.facets().len(), 4);
        assert!(p.is_consistent());
    }

    #[test]
    fn zero_twist_and_bad_params_rejected() {
        let grid = Grid::square(8).unwrap();
        let z = DMatrix::zeros(8, 8);
        let zb = DVector::zeros(8);
        assert!(make_hirzebruch_geometry(&grid, 0, 1.0, &z, &zb, 1.0).is_err());
        assert!(make_hirzebruch_geometry(&grid, 1, -1.5, &z, &zb, 1.0).is_err());
        assert!(make_product_geometry(&grid, &z, &zb, 0.0).is_err());
    }

    #[test]
    fn untwisted_bundle_equals_product() {
        let grid = Grid::square(14).unwrap();
        let phi = grid.sample(|a, b| 0.05 * a * a * (1.0 - a) * (b + 0.3));
        let psi = grid.sample_base(|t| 0.1 * t * t * (1.0 - t));
        let p = make_product_geometry(&grid, &phi, &psi, 1.0).unwrap();
        let h = FibrationGeometry::build(&grid, Provider::Hirzebruch { twist: 0, b: 0.0 }, 1.0, phi, psi)
            .unwrap();
        assert!(p.w().max_abs_diff(h.w()) <= 1e-10);
        assert!(p.b().max_abs_diff(h.b()) <= 1e-10);
    }

    #[test]
    fn split_of_omega_and_beta() {
        let grid = Grid::square(12).unwrap();
        let phi = grid.sample(|a, b| 0.05 * a * a * b * (1.0 - b));
        let g = make_hirzebruch_geometry(&grid, 1, 2.0, &phi, &DVector::zeros(12), 1.0).unwrap();
        let s = g.split_form(g.w());
        assert!(s.mixed.c12.amax() < 1e-12 && s.mixed.c22.amax() < 1e-12);
        assert!((s.horizontal.c22.clone() - g.w_hh()).amax() < 1e-12);
        let sb = g.split_form(g.b());
        assert!(sb.fibre.c11.amax() == 0.0 && sb.mixed.c12.amax() == 0.0);
    }

    #[test]
    fn off_diagonal_form_is_mixed_on_round_product() {
        let g = round(8);
        let mut eta = TwoForm::zeros(8, 8);
        eta.c12.fill(1.0);
        let s = g.split_form(&eta);
        assert!(s.fibre.c11.amax() == 0.0 && s.horizontal.c22.amax() == 0.0);
        assert!(s.mixed.c12.min() == 1.0);
    }

    #[test]
    fn contractions_of_reference_forms() {
        let g = round(10);
        let one = |f: ScalarField| (f.add_constant(-1.0)).max_abs();
        assert!(one(g.contract(g.b(), Direction::Transverse)) < 1e-14);
        assert!(one(g.contract(g.w(), Direction::Leafwise)) < 1e-14);
        assert!(g.contract(g.w(), Direction::Transverse).max_abs() < 1e-14);
    }

    #[test]
    fn round_volumes() {
        let g = round(16);
        let one = ScalarField::total(DMatrix::from_element(16, 16, 1.0));
        let v = g.integrate(&one, &Weight::OmegaBeta, Domain::Global).number().unwrap();
        assert!((v - 4.0 * PI * PI).abs() < 1e-11);
        let f = g.integrate(&one, &Weight::OmegaBeta, Domain::Fibre);
        assert!(f.base().unwrap().iter().all(|u| (u - 2.0 * PI).abs() < 1e-12));
    }

    #[test]
    fn laplacians_of_moment_coordinates() {
        let g = round(16);
        let t2 = ScalarField::base_only(g.grid().base().nodes(), 16);
        let lap = g.laplacian(&t2, Direction::Transverse).unwrap();
        let expect = g.grid().tau2().map(|t| 1.0 - 2.0 * t);
        assert!((lap.values() - expect).amax() < 1e-12);
        let t1 = ScalarField::total(g.grid().tau1());
        let lapf = g.laplacian(&t1, Direction::Leafwise).unwrap();
        let expect = g.grid().tau1().map(|t| 1.0 - 2.0 * t);
        assert!((lapf.values() - expect).amax() < 1e-12);
        let c = ScalarField::base_only(&DVector::from_element(16, 3.0), 16);
        assert!(g.laplacian(&c, Direction::Transverse).unwrap().max_abs() < 1e-12);
        assert_eq!(g.laplacian(&t1, Direction::Transverse).unwrap_err(), GeometryError::NotBaseOnly);
    }

    #[test]
    fn trivial_shifts() {
        let grid = Grid::square(10).unwrap();
        let phi = grid.sample(|a, b| 0.05 * a * (1.0 - a) * a * b);
        let psi = grid.sample_base(|t| 0.1 * t * t * (1.0 - t));
        let g = make_product_geometry(&grid, &phi, &psi, 1.0).unwrap();
        let same = g.shift(&DMatrix::zeros(10, 10), &DVector::zeros(10)).unwrap();
        assert_eq!(same.w(), g.w());
        assert_eq!(same.b(), g.b());
        let back = g.shift(&phi, &psi).unwrap().shift(&(-&phi), &(-&psi)).unwrap();
        assert!(back.w().max_abs_diff(g.w()) <= 1e-12);
        assert!(back.b().max_abs_diff(g.b()) <= 1e-12);
        let bump = grid.sample_base(|t| 0.1 * (std::f64::consts::PI * t).sin().powi(2) * t * (1.0 - t));
        let moved = g.shift_base(&bump).unwrap();
        assert_eq!(moved.w(), g.w());
        assert!(moved.b().max_abs_diff(g.b()) > 1e-3);
    }
}
