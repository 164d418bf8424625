use fibrelab_geometry::{FibrationGeometry, GeometryError};
use nalgebra::{DMatrix, DVector};

use crate::residual::{velocity, Residuals};
use crate::rkc::{spectral_radius, stages_for, RkcTableau, DEFAULT_DAMPING};
use crate::FlowError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StageRule {
    /// Always this many stages; `Fixed(1)` is explicit Euler.
    Fixed(usize),
    /// Enough stages for stability at the estimated spectral radius, capped.
    Auto { cap: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    pub dt: f64,
    pub max_steps: usize,
    pub tol: f64,
    pub stages: StageRule,
    pub damping: f64,
    pub max_retries: u32,
    pub radius_iterations: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt: 0.02,
            max_steps: 10_000,
            tol: 1e-6,
            stages: StageRule::Auto { cap: 400 },
            damping: DEFAULT_DAMPING,
            max_retries: 6,
            radius_iterations: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub stages: usize,
    pub retries: u32,
    pub r_fibre: f64,
    pub r_base: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub geometry: FibrationGeometry,
    pub t: f64,
    pub r_fibre: f64,
    pub r_base: f64,
    pub history: Vec<TraceEntry>,
    /// Spectral radius used by [`StageRule::Auto`], estimated on first use.
    pub radius: Option<f64>,
}

impl FlowState {
    pub fn new(geometry: FibrationGeometry) -> Self {
        let v = velocity(&geometry);
        let entry = TraceEntry {
            step: 0,
            t: 0.0,
            dt: 0.0,
            stages: 0,
            retries: 0,
            r_fibre: v.residuals.r_fibre,
            r_base: v.residuals.r_base,
            energy: v.energy,
        };
        Self {
            geometry,
            t: 0.0,
            r_fibre: entry.r_fibre,
            r_base: entry.r_base,
            history: vec![entry],
            radius: None,
        }
    }

    pub fn residuals(&self) -> Residuals {
        Residuals { r_fibre: self.r_fibre, r_base: self.r_base }
    }
}

fn rebuild(
    g: &FibrationGeometry,
    phi: &DMatrix<f64>,
    psi: &DVector<f64>,
) -> Result<FibrationGeometry, GeometryError> {
    FibrationGeometry::build(g.grid(), g.provider(), g.kappa(), phi.clone(), psi.clone())
}

fn super_step(
    g: &FibrationGeometry,
    dt: f64,
    tab: &RkcTableau,
) -> Result<FibrationGeometry, GeometryError> {
    let f0 = velocity(g);
    let (p0, s0) = (g.phi().clone(), g.psi().clone());
    let c = tab.mu_tilde[1] * dt;
    let (mut p1, mut s1) = (&p0 + &f0.phi * c, &s0 + &f0.psi * c);
    let (mut p2, mut s2) = (p0, s0);
    let mut current = rebuild(g, &p1, &s1)?;
    for j in 2..=tab.stages {
        let f = velocity(&current);
        let c = tab.mu_tilde[j] * dt;
        let pj = &p1 * tab.mu[j] + &p2 * tab.nu[j] + &f.phi * c;
        let sj = &s1 * tab.mu[j] + &s2 * tab.nu[j] + &f.psi * c;
        current = rebuild(g, &pj, &sj)?;
        p2 = std::mem::replace(&mut p1, pj);
        s2 = std::mem::replace(&mut s1, sj);
    }
    Ok(current)
}

/// One accepted flow step. A step whose stages leave the admissible cone is
/// retried with half the time step; under [`StageRule::Auto`] the radius
/// estimate is also raised by half.
pub fn step(state: &FlowState, dt: f64, opts: &FlowOptions) -> Result<FlowState, FlowError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::BadStep(dt));
    }
    let g = &state.geometry;
    let mut radius = match (opts.stages, state.radius) {
        (StageRule::Auto { .. }, None) => Some(spectral_radius(g, opts.radius_iterations)),
        (_, r) => r,
    };
    let mut dt = dt;
    let mut retries = 0;
    loop {
        let stages = match opts.stages {
            StageRule::Fixed(s) => s.max(1),
            StageRule::Auto { cap } => stages_for(dt, radius.unwrap_or(0.0), opts.damping, cap),
        };
        let tab = RkcTableau::new(stages, opts.damping);
        match super_step(g, dt, &tab) {
            Ok(next) => {
                let v = velocity(&next);
                let t = state.t + dt;
                let mut history = state.history.clone();
                history.push(TraceEntry {
                    step: history.len(),
                    t,
                    dt,
                    stages,
                    retries,
                    r_fibre: v.residuals.r_fibre,
                    r_base: v.residuals.r_base,
                    energy: v.energy,
                });
                return Ok(FlowState {
                    geometry: next,
                    t,
                    r_fibre: v.residuals.r_fibre,
                    r_base: v.residuals.r_base,
                    history,
                    radius,
                });
            }
            Err(cause) => {
                if retries >= opts.max_retries {
                    return Err(FlowError::StepSize { dt, retries, cause });
                }
                retries += 1;
                dt *= 0.5;
                radius = radius.map(|r| r * 1.5);
            }
        }
    }
}

/// Steps until `max(r_fibre, r_base) < tol`. Returns the final geometry and
/// the residual trace, or [`FlowError::NotConverged`] carrying the trace.
pub fn solve(
    g: &FibrationGeometry,
    opts: &FlowOptions,
) -> Result<(FibrationGeometry, Vec<TraceEntry>), FlowError> {
    let mut state = FlowState::new(g.clone());
    for _ in 0..opts.max_steps {
        if state.residuals().max() < opts.tol {
            return Ok((state.geometry, state.history));
        }
        state = step(&state, opts.dt, opts)?;
    }
    let residual = state.residuals().max();
    if residual < opts.tol {
        return Ok((state.geometry, state.history));
    }
    Err(FlowError::NotConverged { steps: opts.max_steps, residual, tol: opts.tol, trace: state.history })
}
