use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Product,
    Hirzebruch,
}

/// Perturbation of the fibre potential Φ(τ₁, τ₂), a sum of named basis
/// functions and inline monomials.
///
/// * `bump`: `(τ₁(1−τ₁))²·τ₂(1−τ₂)·16(1 + cos 2πτ₂)`
/// * `mixed`: `τ₁(1−τ₁)·(τ₂(1−τ₂)(τ₁+0.3)(1+τ₂) + 0.5τ₁τ₂²)`
/// * `random`: `τ₁(1−τ₁)·Σ c_ij τ₁^i τ₂^j` over `i + j ≤ 3`, with `c_ij`
///   uniform in `[−1, 1]` drawn from the seed
/// * `poly`: list of `[i, j, c]` meaning `c·τ₁^i τ₂^j`
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhiSpec {
    pub bump: f64,
    pub mixed: f64,
    pub random: f64,
    pub poly: Vec<(u32, u32, f64)>,
}

/// Perturbation of the base potential ψ(τ₂).
///
/// * `cubic`: `τ(1−τ)(τ + 0.5)`
/// * `random`: `τ(1−τ)·Σ c_j τ^j` over `j ≤ 3`, seeded
/// * `poly`: list of `[j, c]` meaning `c·τ^j`
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsiSpec {
    pub cubic: f64,
    pub random: f64,
    pub poly: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Closed-form values on the round product.
    pub baseline: f64,
    /// Change of the transverse Futaki invariant under a β-shift.
    pub invariance: f64,
    /// Pairwise gap between the three Futaki routes.
    pub route: f64,
    pub leading: f64,
    /// Largest admissible log-log slope of adiabatic and expansion defects.
    pub slope: f64,
    /// Relative error of the calibrated toric oracle.
    pub oracle: f64,
    /// Classical Futaki invariant on products.
    pub product_zero: f64,
    pub identity: f64,
    /// Smallest defect ratio per grid doubling.
    pub decay_ratio: f64,
    /// Values below this count as exact zeros in slope fits.
    pub floor: f64,
    /// Defects below this count as converged in refinement decay checks.
    pub decay_floor: f64,
    pub solver_match: f64,
    pub solver_futaki: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            baseline: 1e-8,
            invariance: 1e-6,
            route: 1e-6,
            leading: 1e-6,
            slope: -0.9,
            oracle: 1e-4,
            product_zero: 1e-8,
            identity: 1e-6,
            decay_ratio: 4.0,
            floor: 1e-10,
            decay_floor: 1e-7,
            solver_match: 1e-5,
            solver_futaki: 1e-6,
        }
    }
}

/// Settings of the `solve` experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSpec {
    pub grid: usize,
    pub dt: f64,
    pub max_steps: usize,
    /// Target for the larger of the two sup residuals.
    pub tol: f64,
    pub stage_cap: usize,
}

impl Default for SolveSpec {
    fn default() -> Self {
        Self { grid: 24, dt: 0.02, max_steps: 10_000, tol: 1e-6, stage_cap: 400 }
    }
}

/// Settings of the β-class invariance sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    /// Number of random geometries.
    pub samples: usize,
    /// Number of random transverse potentials.
    pub potentials: usize,
    /// Amplitude of the random Φ and ψ added to each sample.
    pub amplitude: f64,
    /// Step of the central difference in ε.
    pub fd_step: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { samples: 5, potentials: 3, amplitude: 0.05, fd_step: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub provider: ProviderKind,
    /// Hirzebruch twist; ignored for the product.
    pub a: u32,
    /// Hirzebruch horizontal offset; ignored for the product.
    pub b: f64,
    pub kappa: f64,
    /// Working grid size.
    pub grid: usize,
    /// Refinement ladder for decay checks.
    pub grid_sizes: Vec<usize>,
    pub ks: Vec<f64>,
    pub eps: Vec<f64>,
    pub generators: Vec<(i32, i32)>,
    pub seed: u64,
    pub output: PathBuf,
    pub phi: PhiSpec,
    pub psi: PsiSpec,
    pub sweep: SweepSpec,
    pub solve: SolveSpec,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            provider: ProviderKind::Product,
            a: 1,
            b: 0.0,
            kappa: 1.0,
            grid: 48,
            grid_sizes: vec![16, 32, 64],
            ks: vec![8.0, 16.0, 32.0],
            eps: vec![0.05, 0.1, 0.2],
            generators: vec![(1, 0), (0, 1), (1, 1)],
            seed: 7,
            output: PathBuf::from("out"),
            phi: PhiSpec { bump: 0.1, ..PhiSpec::default() },
            psi: PsiSpec::default(),
            sweep: SweepSpec::default(),
            solve: SolveSpec::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Parse(m));
        if self.grid < 4 || self.solve.grid < 4 || self.grid_sizes.iter().any(|n| *n < 4) {
            return bad("grid sizes must be at least 4".into());
        }
        if self.grid_sizes.is_empty() {
            return bad("grid_sizes is empty".into());
        }
        if self.ks.len() < 2 || self.ks.iter().any(|k| !(*k > 0.0)) {
            return bad("ks needs at least two positive entries".into());
        }
        if self.eps.iter().any(|e| !e.is_finite()) {
            return bad("eps entries must be finite".into());
        }
        if self.generators.contains(&(0, 0)) {
            return bad("generator (0, 0) is not allowed".into());
        }
        if !(self.kappa > 0.0) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if self.provider == ProviderKind::Hirzebruch && self.a == 0 {
            return bad("hirzebruch needs a ≥ 1".into());
        }
        if self.sweep.samples == 0 || self.sweep.potentials == 0 || !(self.sweep.fd_step > 0.0) {
            return bad("sweep needs samples, potentials and a positive fd_step".into());
        }
        Ok(())
    }
}
