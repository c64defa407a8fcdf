use std::f64::consts::PI;

use super::{CpProvenance, EstimatorError, NormalizingConstant};
use crate::numerics::{log_gamma, QuadratureGrid, QuadratureRule, SpdMatrix};
use crate::targets::CharacteristicTarget;

/// Relative disagreement that counts as a regression in the closed form.
const HARD_TOLERANCE: f64 = 1e-3;

/// `∫ exp(−(uᵀΣu)^{α/2}) du = (2π^{d/2}/Γ(d/2)) (Γ(d/α)/α) det(Σ)^{−1/2}`.
pub fn mepd_normalizing_constant_closed_form(alpha: f64, sigma: &SpdMatrix) -> Result<f64, EstimatorError> {
    check_alpha(alpha)?;
    let d = sigma.dim() as f64;
    let log_surface = (2.0f64).ln() + 0.5 * d * PI.ln() - log_gamma(0.5 * d)?;
    let log_radial = log_gamma(d / alpha)? - alpha.ln();
    Ok((log_surface + log_radial - 0.5 * sigma.log_det()).exp())
}

/// Cartesian quadrature of the same integral for `d ≤ 2`: Gauss–Legendre in
/// each orthant with the substitution `u = L t³`, where the truncation
/// `L = 50^{1/α}/√λ_min` leaves a tail below `e^{−50}`.
pub fn mepd_normalizing_constant_quadrature(alpha: f64, sigma: &SpdMatrix) -> Result<(f64, f64), EstimatorError> {
    check_alpha(alpha)?;
    let d = sigma.dim();
    if d > 2 {
        return Err(EstimatorError::InvalidParameter(format!(
            "quadrature cross-check only for d <= 2, got d={d}"
        )));
    }
    let lim = 50f64.powf(1.0 / alpha) / sigma.min_eigenvalue().sqrt();
    let nodes = if d == 1 { 800 } else { 240 };
    let grid = QuadratureGrid::cube(d, 0.0, 1.0, nodes, QuadratureRule::GaussLegendre)?;
    let signs: Vec<Vec<f64>> = (0..1usize << d)
        .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect();
    let (value, err) = grid.integrate_real(|t| {
        let jac: f64 = t.iter().map(|s| 3.0 * lim * s * s).product();
        let mut acc = 0.0;
        let mut u = vec![0.0; d];
        for sg in &signs {
            for k in 0..d {
                u[k] = sg[k] * lim * t[k].powi(3);
            }
            acc += (-sigma.quad_form(&u).powf(0.5 * alpha)).exp();
        }
        acc * jac
    })?;
    Ok((value, err))
}

/// Closed-form `C_p` for the spectral density of an elliptically contoured
/// stable law; for `d ≤ 2` it is checked against quadrature on every call.
pub fn mepd_normalizing_constant(alpha: f64, sigma: &SpdMatrix) -> Result<NormalizingConstant, EstimatorError> {
    let closed = mepd_normalizing_constant_closed_form(alpha, sigma)?;
    if sigma.dim() <= 2 {
        let (quad, _) = mepd_normalizing_constant_quadrature(alpha, sigma)?;
        if ((closed - quad) / closed).abs() > HARD_TOLERANCE {
            return Err(EstimatorError::NormalizingConstantMismatch {
                closed,
                quadrature: quad,
            });
        }
    }
    Ok(NormalizingConstant::closed_form(closed))
}

/// `∫|F[π]|` over `grid`.
pub fn normalizing_constant_quadrature(
    target: &dyn CharacteristicTarget,
    grid: &QuadratureGrid,
) -> Result<NormalizingConstant, EstimatorError> {
    if grid.dim() != target.dim() {
        return Err(EstimatorError::Dimension {
            expected: target.dim(),
            got: grid.dim(),
        });
    }
    let (value, error) = grid.integrate_real(|u| target.log_abs_cf(u).exp())?;
    if !(value > 0.0) || !value.is_finite() {
        return Err(EstimatorError::NonFinite("normalizing constant"));
    }
    Ok(NormalizingConstant {
        value,
        error,
        provenance: CpProvenance::Quadrature,
    })
}

fn check_alpha(alpha: f64) -> Result<(), EstimatorError> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(EstimatorError::InvalidParameter(format!("alpha must lie in (0, 2], got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random_rotation;
    use crate::numerics::RngStream;
    use crate::targets::EcsdParams;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_examples() {
        let one = SpdMatrix::identity(1);
        assert_relative_eq!(
            mepd_normalizing_constant(2.0, &one).unwrap().value,
            PI.sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(mepd_normalizing_constant(1.0, &one).unwrap().value, 2.0, max_relative = 1e-13);
        let c = mepd_normalizing_constant(1.0, &SpdMatrix::identity(2)).unwrap();
        assert_relative_eq!(c.value, 2.0 * PI, max_relative = 1e-13);
        assert_eq!(c.provenance, CpProvenance::ClosedForm);
    }

    #[test]
    fn closed_form_matches_quadrature_on_grid() {
        let mut rng = RngStream::new(99, 0);
        let rot = random_rotation(2, &mut rng);
        let sigmas = [
            SpdMatrix::identity(1),
            SpdMatrix::scalar(0.3).unwrap(),
            SpdMatrix::identity(2),
            SpdMatrix::rotated_diagonal(&rot, &[0.4, 2.0]).unwrap(),
        ];
        for alpha in [1.0, 1.2, 1.5, 2.0] {
            for s in &sigmas {
                let closed = mepd_normalizing_constant_closed_form(alpha, s).unwrap();
                let (quad, _) = mepd_normalizing_constant_quadrature(alpha, s).unwrap();
                assert!(((closed - quad) / closed).abs() < 1e-4, "alpha={alpha}, d={}: {closed} vs {quad}", s.dim());
            }
        }
    }

    #[test]
    fn generic_quadrature_examples() {
        let g = EcsdParams::centered(2.0, SpdMatrix::identity(1)).unwrap();
        let grid = QuadratureGrid::cube(1, -10.0, 10.0, 2001, QuadratureRule::Trapezoid).unwrap();
        let c = normalizing_constant_quadrature(&g, &grid).unwrap();
        assert!((c.value - PI.sqrt()).abs() < 1e-6);
        let cauchy = EcsdParams::centered(1.0, SpdMatrix::identity(1)).unwrap();
        let grid = QuadratureGrid::cube(1, -40.0, 40.0, 80_001, QuadratureRule::Trapezoid).unwrap();
        let c = normalizing_constant_quadrature(&cauchy, &grid).unwrap();
        assert!((c.value - 2.0).abs() < 1e-6, "{}", c.value);
        assert_eq!(c.provenance, CpProvenance::Quadrature);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(mepd_normalizing_constant(0.0, &SpdMatrix::identity(1)).is_err());
        assert!(mepd_normalizing_constant(2.5, &SpdMatrix::identity(1)).is_err());
    }
}
