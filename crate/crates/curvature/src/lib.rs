//! Curvature of the testbed fibrations: leafwise Ricci and scalar curvature,
//! transverse Ricci and scalar curvature, the Weil–Petersson form, scalar
//! curvature of `ω + kβ`, and the transverse Lichnerowicz operator.

mod averages;
mod lichnerowicz;
mod scalar;

pub use averages::{average_total, average_total_toric, averages, Averages};
pub use lichnerowicz::{
    lichnerowicz_matrix, lichnerowicz_transverse, linearized_twisted, mixed_ricci_pairing,
    operator_p,
};
pub use scalar::{
    fine_expansion_coefficient, leafwise_ricci, leafwise_scalar, total_scalar, total_scalar_form,
    transverse_ricci_scalar, twisted_base_scalar, twisted_base_scalar_fibre_path, weil_petersson,
    CurvatureBundle, TotalScalar,
};

use fibrelab_geometry::GeometryError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("ω + {k}β is not positive: smallest eigenvalue {min_eigenvalue:e} at node {node:?}")]
    NotPositive { k: f64, node: (usize, usize), min_eigenvalue: f64 },
    #[error("base profile has {found} entries, grid has {expected}")]
    ProfileLength { expected: usize, found: usize },
}
