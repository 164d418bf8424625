//! Futaki-type functionals of torus fields and Hamiltonian pairs, computed
//! along independent routes so that their agreement can be checked.

mod futaki;
mod table;

pub use futaki::{
    classical_futaki, leading_term, moment_pairing, submersion_futaki, submersion_futaki_terms,
    toric_classical_futaki, transverse_futaki, transverse_futaki_terms, twisted_map_functional,
    FutakiTerms,
};
pub use table::{adiabatic_table, fingerprint, AdiabaticRow, AdiabaticTable, FutakiRecord};

use fibrelab_curvature::CurvatureError;
use fibrelab_geometry::GeometryError;
use fibrelab_oracle::OracleError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantsError {
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("the field has no base component")]
    NoBaseComponent,
    #[error("the field is not a torus generator")]
    NotAGenerator,
    #[error("α must be a base form")]
    NotBaseForm,
}
