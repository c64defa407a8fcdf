//! Test functions with closed-form Fourier transforms.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::TargetError;

fn sech(t: f64) -> f64 {
    let e = (-t.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// `∏ sech(√(π/2) xᵢ)`, an eigenfunction of the Fourier transform.
pub fn sech_payoff(x: &[f64]) -> f64 {
    let a = FRAC_PI_2.sqrt();
    x.iter().map(|&xi| sech(a * xi)).product()
}

/// `F[g](u) = (2π)^{d/2} ∏ sech(√(π/2) uᵢ)`.
pub fn sech_payoff_ft(u: &[f64]) -> f64 {
    (2.0 * PI).powf(0.5 * u.len() as f64) * sech_payoff(u)
}

/// Put on the maximum of `d` assets with log-prices `x`: `(K − maxₖ e^{xₖ})⁺`.
pub fn max_put_payoff(x: &[f64], strike: f64) -> f64 {
    let top = x.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
    (strike - top).max(0.0)
}

/// `F[g](iR − u)` for the put on the maximum,
/// `(−1)^{d+1} K^{1−s} / ((s − 1) ∏ zₖ)` with `zₖ = Rₖ + i uₖ`, `s = Σ zₖ`.
pub fn max_put_payoff_ft(strike: f64, damping: &[f64], u: &[f64]) -> Result<Complex64, TargetError> {
    if !(strike > 0.0) {
        return Err(TargetError::InvalidParameter(format!(
            "strike must be positive, got {strike}"
        )));
    }
    if damping.len() != u.len() {
        return Err(TargetError::Dimension {
            expected: damping.len(),
            got: u.len(),
        });
    }
    if damping.iter().any(|&r| !(r < 0.0)) {
        return Err(TargetError::Pole(
            "every damping coordinate must be negative".into(),
        ));
    }
    let z: Vec<Complex64> = damping
        .iter()
        .zip(u)
        .map(|(&r, &uk)| Complex64::new(r, uk))
        .collect();
    let s: Complex64 = z.iter().sum();
    let denom = (s - 1.0) * z.iter().product::<Complex64>();
    if denom.norm() == 0.0 {
        return Err(TargetError::Pole("sum of damping coordinates equals 1".into()));
    }
    let sign = if u.len() % 2 == 1 { 1.0 } else { -1.0 };
    let kpow = ((1.0 - s) * strike.ln()).exp();
    Ok(sign * kpow / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{QuadratureGrid, QuadratureRule};
    use approx::assert_relative_eq;

    #[test]
    fn sech_values() {
        assert_eq!(sech_payoff(&[0.0, 0.0]), 1.0);
        assert_relative_eq!(sech_payoff_ft(&[0.0, 0.0]), 2.0 * PI, max_relative = 1e-15);
        for x in [0.3, 2.0, 40.0, 800.0] {
            assert_eq!(sech_payoff(&[x, -1.0]), sech_payoff(&[-x, 1.0]));
            assert!(sech_payoff(&[x]) < 1.0 && sech_payoff(&[x]) >= 0.0);
        }
    }

    #[test]
    fn sech_transform_matches_numeric_transform() {
        let grid = QuadratureGrid::cube(1, -40.0, 40.0, 4001, QuadratureRule::Trapezoid).unwrap();
        let r = grid
            .integrate(|x| Complex64::from_polar(sech_payoff(x), x[0]))
            .unwrap();
        assert!((r.value.re - sech_payoff_ft(&[1.0])).abs() < 1e-6);
        assert!(r.value.im.abs() < 1e-10);
    }

    #[test]
    fn put_payoff_values() {
        assert_eq!(max_put_payoff(&[5.0f64.ln(), 120f64.ln()], 100.0), 0.0);
        assert_relative_eq!(max_put_payoff(&[50f64.ln(), 80f64.ln()], 100.0), 20.0, max_relative = 1e-12);
    }

    #[test]
    fn put_transform_at_origin() {
        let v = max_put_payoff_ft(100.0, &[-1.5], &[0.0]).unwrap();
        assert_relative_eq!(v.re, 100f64.powf(2.5) / 3.75, max_relative = 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn put_transform_matches_numeric_transform() {
        let (k, r, u) = (100.0f64, -1.5, 2.0);
        let grid =
            QuadratureGrid::cube(1, -10.0, k.ln(), 20001, QuadratureRule::GaussLegendre).unwrap();
        // ∫ e^{i(iR − u)x} g(x) dx = ∫ e^{−Rx} e^{−iux} g(x) dx
        let numeric = grid
            .integrate(|x| Complex64::from_polar((-r * x[0]).exp() * max_put_payoff(x, k), -u * x[0]))
            .unwrap()
            .value;
        let exact = max_put_payoff_ft(k, &[r], &[u]).unwrap();
        // the window [−10, log K] drops a tail of relative size e^{−15}
        assert!((numeric - exact).norm() / exact.norm() < 1e-4);
        assert_relative_eq!(exact.re, 3038.684_900_043_918, max_relative = 1e-12);
        assert_relative_eq!(exact.im, -12_118.743_955_289_048, max_relative = 1e-12);
    }

    #[test]
    fn put_transform_two_assets() {
        let (k, r) = (1.5f64, [-1.5, -1.5]);
        let u = [0.7, -0.3];
        let grid = QuadratureGrid::cube(2, -14.0, k.ln(), 1201, QuadratureRule::GaussLegendre).unwrap();
        let numeric = grid
            .integrate(|x| {
                let damp = (-r[0] * x[0] - r[1] * x[1]).exp();
                Complex64::from_polar(damp * max_put_payoff(x, k), -(u[0] * x[0] + u[1] * x[1]))
            })
            .unwrap()
            .value;
        let exact = max_put_payoff_ft(k, &r, &u).unwrap();
        assert!((numeric - exact).norm() / exact.norm() < 1e-4, "{numeric} vs {exact}");
    }

    #[test]
    fn poles_are_reported() {
        assert!(matches!(max_put_payoff_ft(100.0, &[0.0], &[1.0]), Err(TargetError::Pole(_))));
        assert!(max_put_payoff_ft(-1.0, &[-1.0], &[1.0]).is_err());
    }
}
