use nalgebra::{DMatrix, DVector};

/// Which variables a nodal field depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    TotalSpace,
    /// Constant along fibres; stored redundantly on every fibre row.
    BaseOnly,
    /// Depends on τ₁ only.
    FibreProfile,
}

/// Torus-invariant function sampled on the tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    axis: Axis,
    values: DMatrix<f64>,
}

impl ScalarField {
    pub fn total(values: DMatrix<f64>) -> Self {
        Self { axis: Axis::TotalSpace, values }
    }

    /// Tiles a base profile over `n1` fibre nodes.
    pub fn base_only(profile: &DVector<f64>, n1: usize) -> Self {
        let values = DMatrix::from_fn(n1, profile.len(), |_, j| profile[j]);
        Self { axis: Axis::BaseOnly, values }
    }

    pub fn fibre_profile(profile: &DVector<f64>, n2: usize) -> Self {
        let values = DMatrix::from_fn(profile.len(), n2, |i, _| profile[i]);
        Self { axis: Axis::FibreProfile, values }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn is_base_only(&self) -> bool {
        self.axis == Axis::BaseOnly
    }

    /// First fibre row; the whole field for base-only data.
    pub fn base_profile(&self) -> DVector<f64> {
        self.values.row(0).transpose()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        (&self.values - &other.values).amax()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { axis: self.axis, values: self.values.map(f) }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }
}

/// Components `(η₁₁, η₁₂, η₂₂)` of a torus-invariant real (1,1)-form in the
/// cylinder coframe of the fibre and base log-coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    pub c11: DMatrix<f64>,
    pub c12: DMatrix<f64>,
    pub c22: DMatrix<f64>,
    /// Set when the form was produced as a Hessian of a potential.
    pub exact: bool,
}

impl TwoForm {
    pub fn new(c11: DMatrix<f64>, c12: DMatrix<f64>, c22: DMatrix<f64>) -> Self {
        Self { c11, c12, c22, exact: false }
    }

    pub fn zeros(n1: usize, n2: usize) -> Self {
        let z = DMatrix::zeros(n1, n2);
        Self::new(z.clone(), z.clone(), z)
    }

    /// A form with only the base-base slot.
    pub fn base(c22: DMatrix<f64>) -> Self {
        let (r, c) = c22.shape();
        Self::new(DMatrix::zeros(r, c), DMatrix::zeros(r, c), c22)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.c11.shape()
    }

    pub fn is_finite(&self) -> bool {
        [&self.c11, &self.c12, &self.c22].iter().all(|m| m.iter().all(|v| v.is_finite()))
    }

    pub fn add(&self, other: &TwoForm) -> TwoForm {
        TwoForm::new(&self.c11 + &other.c11, &self.c12 + &other.c12, &self.c22 + &other.c22)
    }

    pub fn sub(&self, other: &TwoForm) -> TwoForm {
        TwoForm::new(&self.c11 - &other.c11, &self.c12 - &other.c12, &self.c22 - &other.c22)
    }

    pub fn scale(&self, s: f64) -> TwoForm {
        TwoForm::new(&self.c11 * s, &self.c12 * s, &self.c22 * s)
    }

    /// Nodewise coefficient of `η ∧ ξ` against `ds₁ ds₂` (angular factor
    /// excluded).
    pub fn wedge(&self, other: &TwoForm) -> DMatrix<f64> {
        let mut out = self.c11.component_mul(&other.c22);
        out += self.c22.component_mul(&other.c11);
        out -= 2.0 * self.c12.component_mul(&other.c12);
        out
    }

    pub fn max_abs_diff(&self, other: &TwoForm) -> f64 {
        (&self.c11 - &other.c11)
            .amax()
            .max((&self.c12 - &other.c12).amax())
            .max((&self.c22 - &other.c22).amax())
    }
}
