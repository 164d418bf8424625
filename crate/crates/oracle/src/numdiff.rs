use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FdError<E> {
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("functional returned a non-finite value at offset {0}")]
    NonFinite(f64),
    #[error("at least two finite, nonzero samples are needed for an order fit")]
    TooFewSamples,
    #[error(transparent)]
    Inner(E),
}

fn sample<E>(f: &mut impl FnMut(f64) -> Result<f64, E>, t: f64) -> Result<f64, FdError<E>> {
    let v = f(t).map_err(FdError::Inner)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FdError::NonFinite(t))
    }
}

/// `(F(+h) − F(−h)) / 2h` for a one-parameter family `F`.
pub fn central_difference<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    step: f64,
) -> Result<f64, FdError<E>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(FdError::BadStep(step));
    }
    let p = sample(&mut f, step)?;
    let m = sample(&mut f, -step)?;
    Ok((p - m) / (2.0 * step))
}

/// Derivative at `t = 0` of `t ↦ functional(base, direction, t)`, where the
/// caller decides how `base` is moved along `direction`.
pub fn fd_directional_derivative<G, D, E>(
    mut functional: impl FnMut(&G, &D, f64) -> Result<f64, E>,
    base: &G,
    direction: &D,
    step: f64,
) -> Result<f64, FdError<E>> {
    central_difference(|t| functional(base, direction, t), step)
}

/// Central differences at `h` and `h/2` combined to cancel the `h²` term.
pub fn richardson_difference<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    step: f64,
) -> Result<f64, FdError<E>> {
    let coarse = central_difference(&mut f, step)?;
    let fine = central_difference(&mut f, step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Least-squares slope of `log|y|` against `log x`.
pub fn richardson_order<E>(pairs: &[(f64, f64)]) -> Result<f64, FdError<E>> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(x, y)| *x > 0.0 && y.abs() > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 || pts.len() != pairs.len() {
        return Err(FdError::TooFewSamples);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(FdError::TooFewSamples);
    }
    Ok(sxy / sxx)
}

/// Successive ratios `d[i] / d[i+1]` of a refinement sequence of defects.
pub fn decay_ratios(defects: &[f64]) -> Vec<f64> {
    defects.windows(2).map(|w| w[0].abs() / w[1].abs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn constant_has_zero_derivative() {
        assert_eq!(central_difference(|_| ok(3.0), 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn exact_order_on_power_law() {
        let pairs: Vec<(f64, f64)> = [8.0, 16.0, 32.0].iter().map(|k| (*k, 3.0 / k)).collect();
        let s = richardson_order::<Infallible>(&pairs).unwrap();
        assert!((s + 1.0).abs() < 1e-10);
    }

    #[test]
    fn central_difference_is_second_order() {
        let f = |t: f64| ok((1.3 * t).sin() + t * t * t);
        let exact = 1.3;
        let e1 = (central_difference(f, 1e-2).unwrap() - exact).abs();
        let e2 = (central_difference(f, 5e-3).unwrap() - exact).abs();
        assert!((e1 / e2 - 4.0).abs() < 0.05);
        let r = (richardson_difference(f, 1e-2).unwrap() - exact).abs();
        assert!(r < 1e-9);
    }

    #[test]
    fn bad_step_and_nan_reported() {
        assert_eq!(central_difference(|_| ok(1.0), 0.0), Err(FdError::BadStep(0.0)));
        assert_eq!(
            central_difference(|t| ok(if t > 0.0 { f64::NAN } else { 0.0 }), 0.1),
            Err(FdError::NonFinite(0.1))
        );
    }

    #[test]
    fn directional_form_threads_base_and_direction() {
        let d = fd_directional_derivative(|b: &f64, d: &f64, t| ok((b + d * t).exp()), &0.0, &2.0, 1e-4)
            .unwrap();
        assert!((d - 2.0).abs() < 1e-7);
    }
}
