use std::hash::{DefaultHasher, Hash, Hasher};

use fibrelab_geometry::{FibrationGeometry, Provider, TorusField};
use fibrelab_oracle::{richardson_order, FdError};

use crate::futaki::{classical_futaki, moment_pairing, submersion_futaki, transverse_futaki};
use crate::InvariantsError;

/// Defects below this are treated as exact zeros when fitting orders.
const FIT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticRow {
    pub k: f64,
    /// `Fut_k / 2k`.
    pub scaled: f64,
    pub transverse: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticTable {
    pub rows: Vec<AdiabaticRow>,
    /// Log-log slope of `|difference|` against `k`; `None` when every
    /// difference is below the fitting floor.
    pub order: Option<f64>,
}

pub fn adiabatic_table(
    g: &FibrationGeometry,
    v: &TorusField,
    ks: &[f64],
) -> Result<AdiabaticTable, InvariantsError> {
    let transverse = transverse_futaki(g, v);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let scaled = classical_futaki(g, v, k)? / (2.0 * k);
        rows.push(AdiabaticRow { k, scaled, transverse, difference: scaled - transverse });
    }
    let order = if rows.iter().all(|r| r.difference.abs() < FIT_FLOOR) {
        None
    } else {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.k, r.difference)).collect();
        richardson_order::<FdError<()>>(&pairs).ok()
    };
    Ok(AdiabaticTable { rows, order })
}

/// Every Futaki-type value of one field on one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct FutakiRecord {
    pub transverse: f64,
    pub submersion: f64,
    pub classical_k: Vec<(f64, f64)>,
    pub leading_term: f64,
    pub pairing: f64,
    pub field: String,
    pub fingerprint: u64,
}

impl FutakiRecord {
    pub fn compute(
        g: &FibrationGeometry,
        v: &TorusField,
        ks: &[f64],
    ) -> Result<Self, InvariantsError> {
        let classical_k = ks
            .iter()
            .map(|&k| classical_futaki(g, v, k).map(|f| (k, f)))
            .collect::<Result<Vec<_>, _>>()?;
        let leading_term = crate::futaki::leading_term(g, v).unwrap_or(0.0);
        let field = match v.generator() {
            Some((a, b)) => format!("generator({a},{b})"),
            None => "hamiltonian-pair".to_string(),
        };
        Ok(Self {
            transverse: transverse_futaki(g, v),
            submersion: submersion_futaki(g, v),
            classical_k,
            leading_term,
            pairing: moment_pairing(g, v),
            field,
            fingerprint: fingerprint(g),
        })
    }

    /// Largest pairwise gap between the three routes.
    pub fn route_gap(&self) -> f64 {
        let (t, s, p) = (self.transverse, self.submersion, self.pairing);
        (t - s).abs().max((t - p).abs()).max((s - p).abs())
    }
}

/// Hash of the provider, grid size and nodal potentials.
pub fn fingerprint(g: &FibrationGeometry) -> u64 {
    let mut h = DefaultHasher::new();
    match g.provider() {
        Provider::Product => 0u8.hash(&mut h),
        Provider::Hirzebruch { twist, b } => {
            1u8.hash(&mut h);
            twist.hash(&mut h);
            b.to_bits().hash(&mut h);
        }
    }
    g.shape().hash(&mut h);
    g.kappa().to_bits().hash(&mut h);
    for v in g.phi().iter().chain(g.psi().iter()) {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}
