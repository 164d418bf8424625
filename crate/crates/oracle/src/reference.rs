use std::f64::consts::PI;

use crate::OracleError;

/// Values of the round Fubini–Study model, `f(s) = log(1 + e^s)`, in the
/// area-2π normalization with `S = Λ Ric`.
#[derive(Debug, Clone)]
pub enum ClosedForm {
    Constants(Vec<(&'static str, f64)>),
    /// A function of one momentum coordinate or parameter.
    Profile(fn(f64) -> f64),
}

impl ClosedForm {
    pub fn constant(&self, key: &str) -> Option<f64> {
        match self {
            ClosedForm::Constants(v) => v.iter().find(|(k, _)| *k == key).map(|(_, x)| *x),
            ClosedForm::Profile(_) => None,
        }
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        match self {
            ClosedForm::Profile(f) => Some(f(t)),
            ClosedForm::Constants(_) => None,
        }
    }
}

pub const REFERENCE_NAMES: [&str; 7] = [
    "round_product",
    "fs_scalar",
    "fs_hessian",
    "fs_moment_laplacian",
    "round_total_scalar",
    "scaled_base_scalar",
    "round_hamiltonian",
];

fn fs_hessian(t: f64) -> f64 {
    t * (1.0 - t)
}

fn fs_moment_laplacian(t: f64) -> f64 {
    1.0 - 2.0 * t
}

fn round_total_scalar(k: f64) -> f64 {
    2.0 + 2.0 / k
}

fn scaled_base_scalar(kappa: f64) -> f64 {
    2.0 / kappa
}

fn round_hamiltonian(t: f64) -> f64 {
    t - 0.5
}

pub fn closed_form_reference(name: &str) -> Result<ClosedForm, OracleError> {
    let v = match name {
        "round_product" => ClosedForm::Constants(vec![
            ("leafwise_scalar", 2.0),
            ("transverse_scalar", 2.0),
            ("lambda", 2.0),
            ("average_twisted", 2.0),
            ("average_leafwise", 2.0),
            ("weil_petersson", 0.0),
            ("futaki", 0.0),
            ("volume", 4.0 * PI * PI),
            ("fibre_area", 2.0 * PI),
        ]),
        "fs_scalar" => ClosedForm::Constants(vec![("scalar", 2.0), ("area", 2.0 * PI)]),
        "fs_hessian" => ClosedForm::Profile(fs_hessian),
        "fs_moment_laplacian" => ClosedForm::Profile(fs_moment_laplacian),
        "round_total_scalar" => ClosedForm::Profile(round_total_scalar),
        "scaled_base_scalar" => ClosedForm::Profile(scaled_base_scalar),
        "round_hamiltonian" => ClosedForm::Profile(round_hamiltonian),
        other => return Err(OracleError::UnknownReference(other.to_string())),
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_name_resolves() {
        for name in REFERENCE_NAMES {
            assert!(closed_form_reference(name).is_ok(), "{name}");
        }
    }

    #[test]
    fn round_product_constants() {
        let r = closed_form_reference("round_product").unwrap();
        for key in ["leafwise_scalar", "transverse_scalar", "lambda", "average_twisted"] {
            assert_eq!(r.constant(key), Some(2.0));
        }
        assert_eq!(r.eval(0.3), None);
    }

    #[test]
    fn fs_identities_hold_by_hand() {
        // d/ds of f''(s) = τ(1−τ) is τ(1−τ)(1−2τ); dividing by f'' gives 1 − 2τ
        let lap = closed_form_reference("fs_moment_laplacian").unwrap();
        let hess = closed_form_reference("fs_hessian").unwrap();
        let s: f64 = 0.7;
        let t = 1.0 / (1.0 + (-s).exp());
        let h = 1e-5;
        let fpp = |s: f64| {
            let t = 1.0 / (1.0 + (-s).exp());
            t * (1.0 - t)
        };
        let d = (fpp(s + h) - fpp(s - h)) / (2.0 * h);
        assert!((d / hess.eval(t).unwrap() - lap.eval(t).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert_eq!(
            closed_form_reference("nope").unwrap_err(),
            OracleError::UnknownReference("nope".into())
        );
    }
}
