//! Gamma function on the positive axis and, by reflection, at negative
//! non-integer arguments.

use std::f64::consts::PI;

use super::NumericsError;

pub fn log_gamma(z: f64) -> Result<f64, NumericsError> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(NumericsError::Domain(format!(
            "log_gamma requires a finite positive argument, got {z}"
        )));
    }
    Ok(statrs::function::gamma::ln_gamma(z))
}

/// Γ(z) for any real `z` that is not a non-positive integer.
pub fn gamma(z: f64) -> Result<f64, NumericsError> {
    if !z.is_finite() {
        return Err(NumericsError::NonFinite("gamma argument"));
    }
    if z <= 0.0 && z == z.round() {
        return Err(NumericsError::Pole(z));
    }
    if z >= 0.5 {
        Ok(statrs::function::gamma::gamma(z))
    } else {
        // Γ(z) Γ(1−z) = π / sin(πz)
        let s = (PI * z).sin();
        Ok(PI / (s * statrs::function::gamma::gamma(1.0 - z)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn known_values() {
        assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(4.0).unwrap(), 6.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(-1.5).unwrap(), 4.0 / 3.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(log_gamma(10.0).unwrap(), 362_880f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn poles_are_rejected() {
        assert!(matches!(gamma(0.0), Err(NumericsError::Pole(_))));
        assert!(matches!(gamma(-3.0), Err(NumericsError::Pole(_))));
        assert!(log_gamma(-0.5).is_err());
    }
}
