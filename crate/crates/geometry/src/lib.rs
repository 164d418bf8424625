//! Torus-invariant geometry on the testbed fibrations `P¹ × P¹ → P¹` and
//! Hirzebruch surfaces, sampled on Chebyshev grids in reference momentum
//! coordinates `τ₁` (fibre) and `τ₂` (base).

mod chart;
mod field;
mod geometry;
mod grid;
mod potentials;

pub use chart::{Chart, Potential};
pub use field::{Axis, ScalarField, TwoForm};
pub use geometry::{
    make_hirzebruch_geometry, make_product_geometry, Direction, Domain, FibrationGeometry,
    Integral, Normalization, Provider, Split, Weight,
};
pub use grid::{ChebAxis, Grid, MIN_NODES};
pub use potentials::{base_moment, fibre_moments, potentials, TorusField};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("grid needs at least 4 nodes per axis, got {0}")]
    GridTooSmall(usize),
    #[error("array shape {found:?} does not match grid {expected:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("{what} not positive at node {node:?} (value {value:e})")]
    Positivity { what: &'static str, node: (usize, usize), value: f64 },
    #[error("field is not base-only")]
    NotBaseOnly,
    #[error("the zero generator has no Hamiltonian")]
    ZeroGenerator,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}
