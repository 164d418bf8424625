use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::field::TwoForm;
use crate::grid::Grid;

/// Invariant Kähler potential split into closed-form singular pieces and a
/// smooth nodal remainder:
/// `fibre_fs·log(1+e^σ) + base_fs·log(1+e^{s₂}) + bilinear·s₁s₂ + smooth`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub fibre_fs: f64,
    pub base_fs: f64,
    pub bilinear: f64,
    pub smooth: DMatrix<f64>,
}

impl Potential {
    pub fn smooth(smooth: DMatrix<f64>) -> Self {
        Self { fibre_fs: 0.0, base_fs: 0.0, bilinear: 0.0, smooth }
    }
}

/// Holomorphic log-coordinate derivatives on the grid.
///
/// `D₁ = τ₁(1−τ₁)∂_{τ₁}` and `D₂ = τ₂(1−τ₂)∂_{τ₂} + a·τ₂·D₁`, where `a` is the
/// bundle twist (zero for the product). The two operators commute exactly,
/// also after discretization.
#[derive(Debug, Clone)]
pub struct Chart {
    grid: Arc<Grid>,
    twist: f64,
    p1: DMatrix<f64>,
    p2: DMatrix<f64>,
    t1: DMatrix<f64>,
    t2: DMatrix<f64>,
    base_density: DVector<f64>,
    base_diff_t: DMatrix<f64>,
}

impl Chart {
    pub fn new(grid: Arc<Grid>, twist: f64) -> Self {
        let p1 = grid.sample(|t, _| t * (1.0 - t));
        let p2 = grid.sample(|_, t| t * (1.0 - t));
        let t1 = grid.tau1();
        let t2 = grid.tau2();
        let base_density = grid.base().fs_density();
        let base_diff_t = grid.base().diff().transpose();
        Self { grid, twist, p1, p2, t1, t2, base_density, base_diff_t }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn twist(&self) -> f64 {
        self.twist
    }

    /// `τ₁(1−τ₁)` on the grid.
    pub fn p1(&self) -> &DMatrix<f64> {
        &self.p1
    }

    pub fn p2(&self) -> &DMatrix<f64> {
        &self.p2
    }

    pub fn t1(&self) -> &DMatrix<f64> {
        &self.t1
    }

    pub fn t2(&self) -> &DMatrix<f64> {
        &self.t2
    }

    pub fn base_density(&self) -> &DVector<f64> {
        &self.base_density
    }

    /// `∂_{τ₁}F`.
    pub fn partial1(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        self.grid.fibre().diff() * f
    }

    /// `∂_{τ₂}F`.
    pub fn partial2(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        f * &self.base_diff_t
    }

    pub fn d1(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        self.p1.component_mul(&self.partial1(f))
    }

    pub fn d2(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = self.p2.component_mul(&self.partial2(f));
        if self.twist != 0.0 {
            out += (self.t2.component_mul(&self.d1(f))) * self.twist;
        }
        out
    }

    /// Base derivative `τ₂(1−τ₂) d/dτ₂` of a base profile.
    pub fn db(&self, v: &DVector<f64>) -> DVector<f64> {
        self.base_density.component_mul(&(self.grid.base().diff() * v))
    }

    /// `i∂∂̄F` of an invariant potential: comps `D_i D_j F`.
    pub fn hessian_form(&self, f: &DMatrix<f64>) -> TwoForm {
        let d1f = self.d1(f);
        let d2f = self.d2(f);
        let mut h = TwoForm::new(self.d1(&d1f), self.d1(&d2f), self.d2(&d2f));
        h.exact = true;
        h
    }

    /// `i∂∂̄` of a potential with closed-form singular parts.
    pub fn hessian_of(&self, f: &Potential) -> TwoForm {
        let a = self.twist;
        let (p1, p2, t1, t2) = (&self.p1, &self.p2, &self.t1, &self.t2);
        let mut h = self.hessian_form(&f.smooth);
        let (n1, n2) = p1.shape();
        for j in 0..n2 {
            for i in 0..n1 {
                let (p1, p2, t1, t2) = (p1[(i, j)], p2[(i, j)], t1[(i, j)], t2[(i, j)]);
                h.c11[(i, j)] += f.fibre_fs * p1;
                h.c12[(i, j)] += f.fibre_fs * a * t2 * p1 + f.bilinear;
                h.c22[(i, j)] += f.fibre_fs * (a * t1 * p2 + a * a * t2 * t2 * p1) + f.base_fs * p2;
            }
        }
        h
    }

    /// Closed form of `Hess log(τ₁(1−τ₁))`.
    pub fn log_p1_hessian(&self) -> TwoForm {
        let a = self.twist;
        let (p1, p2, t1, t2) = (&self.p1, &self.p2, &self.t1, &self.t2);
        let c11 = p1 * -2.0;
        let c12 = t2.component_mul(p1) * (-2.0 * a);
        let c22 = DMatrix::from_fn(p1.nrows(), p1.ncols(), |i, j| {
            a * p2[(i, j)] * (1.0 - 2.0 * t1[(i, j)]) - 2.0 * a * a * t2[(i, j)].powi(2) * p1[(i, j)]
        });
        let mut h = TwoForm::new(c11, c12, c22);
        h.exact = true;
        h
    }

    /// Closed form of `Hess log(τ₂(1−τ₂))`.
    pub fn log_p2_hessian(&self) -> TwoForm {
        let mut h = TwoForm::base(&self.p2 * -2.0);
        h.exact = true;
        h
    }
}
