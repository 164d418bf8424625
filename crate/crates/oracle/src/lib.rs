//! Reference computations that never touch the spectral kernel: exact toric
//! polytope integrals, closed-form Fubini–Study values, and finite-difference
//! helpers used to audit analytic derivatives.

mod numdiff;
mod polytope;
mod reference;
mod toric;

pub use numdiff::{
    central_difference, decay_ratios, fd_directional_derivative, richardson_difference,
    richardson_order, FdError,
};
pub use polytope::{exact, AffineFunction, Facet, PolytopeData, Rational};
pub use reference::{closed_form_reference, ClosedForm, REFERENCE_NAMES};
pub use toric::{boundary_functional, toric_average_scalar, toric_futaki_oracle, ToricOracle};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("function is not affine: term of degree {degree}")]
    NonAffine { degree: u32 },
    #[error("function does not have mean zero on the polytope (mean = {mean})")]
    NotMeanZero { mean: f64 },
    #[error("polytope parameters are degenerate: {0}")]
    Degenerate(String),
    #[error("non-finite input {0}")]
    NonFinite(f64),
    #[error("unknown closed-form reference `{0}`")]
    UnknownReference(String),
    #[error("calibration datum has zero oracle value")]
    ZeroCalibration,
}
