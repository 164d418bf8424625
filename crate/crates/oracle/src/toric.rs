use num_traits::{ToPrimitive, Zero};

use crate::polytope::{AffineFunction, PolytopeData, Rational};
use crate::OracleError;

/// `2∫_{∂P} f dσ − (2|∂P|/|P|)∫_P f dμ` in exact arithmetic, for `f` of mean
/// zero on `P`.
pub fn boundary_functional(p: &PolytopeData, f: &AffineFunction) -> Result<Rational, OracleError> {
    let bulk = p.integrate(f);
    if !bulk.is_zero() {
        let mean = (bulk / p.volume()).to_f64().unwrap_or(f64::NAN);
        return Err(OracleError::NotMeanZero { mean });
    }
    let two = Rational::from_integer(2.into());
    let ratio = p.boundary_volume() / p.volume();
    Ok(&two * p.integrate_boundary(f) - two * ratio * bulk)
}

/// Average scalar curvature of any torus-invariant metric on the toric surface
/// with moment polygon `p`, in the area-2π normalization.
pub fn toric_average_scalar(p: &PolytopeData) -> Rational {
    p.boundary_volume() / p.volume()
}

/// Boundary formula scaled by a frozen normalization constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToricOracle {
    c0: f64,
}

impl ToricOracle {
    pub fn with_constant(c0: f64) -> Self {
        Self { c0 }
    }

    /// Fixes the constant from a single observed Futaki value.
    pub fn calibrate(
        p: &PolytopeData,
        f: &AffineFunction,
        observed: f64,
    ) -> Result<Self, OracleError> {
        let raw = boundary_functional(p, f)?;
        if raw.is_zero() {
            return Err(OracleError::ZeroCalibration);
        }
        Ok(Self { c0: observed / raw.to_f64().unwrap_or(f64::NAN) })
    }

    pub fn constant(&self) -> f64 {
        self.c0
    }

    pub fn predict(&self, p: &PolytopeData, f: &AffineFunction) -> Result<f64, OracleError> {
        toric_futaki_oracle(p, f, self.c0)
    }
}

pub fn toric_futaki_oracle(
    p: &PolytopeData,
    f: &AffineFunction,
    c0: f64,
) -> Result<f64, OracleError> {
    let raw = boundary_functional(p, f)?;
    Ok(c0 * raw.to_f64().unwrap_or(f64::NAN))
}
