use std::f64::consts::PI;
use std::sync::Arc;

use fibrelab_geometry::{
    make_hirzebruch_geometry, make_product_geometry, FibrationGeometry, Grid, TorusField,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, PhiSpec, ProviderKind, PsiSpec};
use crate::CliError;

const PHI_STREAM: u64 = 1;
const PSI_STREAM: u64 = 2;
const POTENTIAL_STREAM: u64 = 3;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn uniform(r: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| r.gen_range(-1.0..=1.0)).collect()
}

pub fn phi_bump(t1: f64, t2: f64) -> f64 {
    (t1 * (1.0 - t1)).powi(2) * t2 * (1.0 - t2) * 16.0 * (1.0 + (2.0 * PI * t2).cos())
}

pub fn phi_mixed(t1: f64, t2: f64) -> f64 {
    t1 * (1.0 - t1) * (t2 * (1.0 - t2) * (t1 + 0.3) * (1.0 + t2) + 0.5 * t1 * t2 * t2)
}

pub fn psi_cubic(t: f64) -> f64 {
    t * (1.0 - t) * (t + 0.5)
}

/// Exponents `(i, j)` with `i + j ≤ 3`, in a fixed order.
fn monomials() -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for d in 0..=3 {
        for i in 0..=d {
            out.push((i, d - i));
        }
    }
    out
}

impl PhiSpec {
    pub fn sample(&self, grid: &Arc<Grid>, seed: u64) -> DMatrix<f64> {
        let coeffs = uniform(&mut rng(seed, PHI_STREAM), monomials().len());
        let terms = monomials();
        grid.sample(|t1, t2| {
            let mut v = self.bump * phi_bump(t1, t2) + self.mixed * phi_mixed(t1, t2);
            if self.random != 0.0 {
                let poly: f64 =
                    terms.iter().zip(&coeffs).map(|((i, j), c)| c * t1.powi(*i) * t2.powi(*j)).sum();
                v += self.random * t1 * (1.0 - t1) * poly;
            }
            for (i, j, c) in &self.poly {
                v += c * t1.powi(*i as i32) * t2.powi(*j as i32);
            }
            v
        })
    }
}

impl PsiSpec {
    pub fn sample(&self, grid: &Arc<Grid>, seed: u64) -> DVector<f64> {
        let coeffs = uniform(&mut rng(seed, PSI_STREAM), 4);
        grid.sample_base(|t| {
            let mut v = self.cubic * psi_cubic(t);
            if self.random != 0.0 {
                let poly: f64 = coeffs.iter().enumerate().map(|(j, c)| c * t.powi(j as i32)).sum();
                v += self.random * t * (1.0 - t) * poly;
            }
            for (j, c) in &self.poly {
                v += c * t.powi(*j as i32);
            }
            v
        })
    }
}

/// The configured geometry on an `n × n` grid.
pub fn geometry(cfg: &ExperimentConfig, n: usize) -> Result<FibrationGeometry, CliError> {
    geometry_with(cfg, n, &cfg.phi, &cfg.psi, cfg.seed)
}

pub fn geometry_with(
    cfg: &ExperimentConfig,
    n: usize,
    phi: &PhiSpec,
    psi: &PsiSpec,
    seed: u64,
) -> Result<FibrationGeometry, CliError> {
    let grid = Grid::square(n)?;
    let phi = phi.sample(&grid, seed);
    let psi = psi.sample(&grid, seed);
    let g = match cfg.provider {
        ProviderKind::Product => make_product_geometry(&grid, &phi, &psi, cfg.kappa)?,
        ProviderKind::Hirzebruch => {
            make_hirzebruch_geometry(&grid, cfg.a, cfg.b, &phi, &psi, cfg.kappa)?
        }
    };
    Ok(g)
}

pub fn round_product(n: usize) -> Result<FibrationGeometry, CliError> {
    let grid = Grid::square(n)?;
    Ok(make_product_geometry(&grid, &DMatrix::zeros(n, n), &DVector::zeros(n), 1.0)?)
}

/// Sample `index` of the random geometries of the invariance sweep: the
/// configured perturbation plus seeded random parts of the given amplitude.
pub fn random_geometry(
    cfg: &ExperimentConfig,
    n: usize,
    index: usize,
) -> Result<FibrationGeometry, CliError> {
    let amp = cfg.sweep.amplitude;
    let phi = PhiSpec { random: cfg.phi.random + amp, ..cfg.phi.clone() };
    let psi = PsiSpec { random: cfg.psi.random + amp, ..cfg.psi.clone() };
    geometry_with(cfg, n, &phi, &psi, cfg.seed.wrapping_add(1 + index as u64))
}

/// Random transverse potential `φ = Σ c_m τ^m`, `m = 1..4`, scaled so that
/// `|∂(τ(1−τ)∂φ)| ≤ 1` on [0, 1].
pub fn random_potential(grid: &Arc<Grid>, seed: u64, index: usize) -> DVector<f64> {
    let mut r = rng(seed.wrapping_add(index as u64), POTENTIAL_STREAM);
    let c = uniform(&mut r, 4);
    // ∂(τ(1−τ)∂τ^m) = m²τ^{m−1} − m(m+1)τ^m
    let bound: f64 = c
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let m = (i + 1) as f64;
            c.abs() * (2.0 * m * m + m)
        })
        .sum();
    grid.sample_base(|t| c.iter().enumerate().map(|(i, c)| c * t.powi(i as i32 + 1)).sum::<f64>() / bound)
}

/// Fixed analytic Hamiltonian pair used where a non-generator field is needed.
pub fn hamiltonian_pair(g: &FibrationGeometry) -> Result<TorusField, CliError> {
    let grid = g.grid();
    let h_f = grid.sample(|a, b| a * a * b + (a + 2.0 * b).cos());
    let h = grid.sample_base(|t| t * t + 0.3 * (4.0 * t).sin());
    Ok(TorusField::custom(g, &h_f, &h)?)
}

/// Fixed analytic transverse test potential.
pub fn test_potential(grid: &Arc<Grid>) -> DVector<f64> {
    grid.sample_base(|t| (2.0 * t).cos() + t * t * t)
}
