use fibrelab_geometry::FibrationGeometry;
use nalgebra::{DMatrix, DVector};

use crate::residual::velocity;

/// Damping of the first-order Chebyshev super-step.
pub const DEFAULT_DAMPING: f64 = 2.0;

/// Coefficients of an `s`-stage damped first-order Runge–Kutta–Chebyshev
/// step: `Y₁ = Y₀ + μ̃₁ dt F(Y₀)`, `Y_j = μ_j Y_{j−1} + ν_j Y_{j−2} + μ̃_j dt F(Y_{j−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct RkcTableau {
    pub stages: usize,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub mu_tilde: Vec<f64>,
}

impl RkcTableau {
    pub fn new(stages: usize, damping: f64) -> Self {
        let s = stages.max(1);
        let w0 = 1.0 + damping / (s * s) as f64;
        // Chebyshev polynomials T_j(w0) and U_j(w0)
        let mut t = vec![1.0, w0];
        let mut u = vec![1.0, 2.0 * w0];
        for j in 2..=s {
            t.push(2.0 * w0 * t[j - 1] - t[j - 2]);
            u.push(2.0 * w0 * u[j - 1] - u[j - 2]);
        }
        let w1 = t[s] / (s as f64 * u[s - 1]);
        let b: Vec<f64> = t.iter().map(|v| 1.0 / v).collect();
        let mut mu = vec![0.0; s + 1];
        let mut nu = vec![0.0; s + 1];
        let mut mu_tilde = vec![0.0; s + 1];
        mu_tilde[1] = w1 / w0;
        for j in 2..=s {
            mu[j] = 2.0 * w0 * b[j] / b[j - 1];
            nu[j] = -b[j] / b[j - 2];
            mu_tilde[j] = 2.0 * w1 * b[j] / b[j - 1];
        }
        Self { stages: s, mu, nu, mu_tilde }
    }

    /// Length of the real stability interval, where `w₀ + w₁z = −1`.
    pub fn stability_bound(stages: usize, damping: f64) -> f64 {
        let s = stages.max(1);
        let w0 = 1.0 + damping / (s * s) as f64;
        let (mut t0, mut t1) = (1.0, w0);
        let (mut u0, mut u1) = (1.0, 2.0 * w0);
        for _ in 2..=s {
            (t0, t1) = (t1, 2.0 * w0 * t1 - t0);
            (u0, u1) = (u1, 2.0 * w0 * u1 - u0);
        }
        let w1 = t1 / (s as f64 * u0);
        (1.0 + w0) / w1
    }
}

/// Smallest stage count whose stability interval covers `1.2·dt·ρ`.
pub fn stages_for(dt: f64, radius: f64, damping: f64, cap: usize) -> usize {
    let target = 1.2 * dt * radius;
    let cap = cap.max(1);
    let mut s = 1;
    while s < cap && RkcTableau::stability_bound(s, damping) < target {
        s += 1;
    }
    s
}

fn probe(n1: usize, n2: usize) -> (DMatrix<f64>, DVector<f64>) {
    let phi = DMatrix::from_fn(n1, n2, |i, j| ((i as f64) * 1.3 + (j as f64) * 0.7 + 0.1).sin());
    let psi = DVector::from_fn(n2, |j, _| ((j as f64) * 2.1 + 0.4).cos());
    (phi, psi)
}

/// Power-iteration estimate of the spectral radius of the linearised flow at
/// `g`, by central differences of the velocity.
pub fn spectral_radius(g: &FibrationGeometry, iterations: usize) -> f64 {
    let (n1, n2) = g.shape();
    let (mut vp, mut vs) = probe(n1, n2);
    let eps = 1e-7;
    let mut radius = 0.0;
    for _ in 0..iterations {
        let norm = (vp.norm_squared() + vs.norm_squared()).sqrt();
        vp /= norm;
        vs /= norm;
        let fwd = g.shift(&(&vp * eps), &(&vs * eps));
        let bwd = g.shift(&(&vp * -eps), &(&vs * -eps));
        let (Ok(fwd), Ok(bwd)) = (fwd, bwd) else { break };
        let (a, b) = (velocity(&fwd), velocity(&bwd));
        vp = (a.phi - b.phi) / (2.0 * eps);
        vs = (a.psi - b.psi) / (2.0 * eps);
        radius = (vp.norm_squared() + vs.norm_squared()).sqrt();
    }
    radius
}
