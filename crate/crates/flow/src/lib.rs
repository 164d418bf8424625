//! Coupled flow on the potentials `(Φ, ψ)` towards a fibrewise cscK `ω` with
//! constant twisted transverse scalar curvature.

mod residual;
mod rkc;
mod solve;

pub use residual::{energy, residuals, velocity, Residuals, Velocity};
pub use rkc::{spectral_radius, stages_for, RkcTableau, DEFAULT_DAMPING};
pub use solve::{solve, step, FlowOptions, FlowState, StageRule, TraceEntry};

use fibrelab_geometry::GeometryError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("step rejected {retries} times, last dt {dt:e}: {cause}")]
    StepSize { dt: f64, retries: u32, cause: GeometryError },
    #[error("no convergence after {steps} steps: residual {residual:e} (tolerance {tol:e})")]
    NotConverged { steps: usize, residual: f64, tol: f64, trace: Vec<TraceEntry> },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
