use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_dim, CharacteristicTarget, LogDensity, TargetError};
use crate::numerics::{dot, log_gamma, SpdMatrix};

/// Elliptically contoured α-stable law with characteristic function
/// `exp(−(uᵀΣu)^{α/2} + i uᵀμ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EcsdParams {
    alpha: f64,
    sigma: SpdMatrix,
    mu: Vec<f64>,
}

impl EcsdParams {
    pub fn new(alpha: f64, sigma: SpdMatrix, mu: Vec<f64>) -> Result<Self, TargetError> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(TargetError::InvalidParameter(format!(
                "alpha must lie in (0, 2], got {alpha}"
            )));
        }
        check_dim(sigma.dim(), &mu)?;
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(TargetError::InvalidParameter("mu must be finite".into()));
        }
        Ok(Self { alpha, sigma, mu })
    }

    pub fn centered(alpha: f64, sigma: SpdMatrix) -> Result<Self, TargetError> {
        let d = sigma.dim();
        Self::new(alpha, sigma, vec![0.0; d])
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> &SpdMatrix {
        &self.sigma
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Closed-form density for the Cauchy case (α = 1).
    pub fn cauchy_density(&self, x: &[f64]) -> Result<f64, TargetError> {
        EllipticalDensity::cauchy(self.clone()).map(|d| d.log_density(x).exp())
    }
}

impl CharacteristicTarget for EcsdParams {
    fn dim(&self) -> usize {
        self.sigma.dim()
    }

    fn log_abs_cf(&self, u: &[f64]) -> f64 {
        -self.sigma.quad_form(u).powf(0.5 * self.alpha)
    }

    /// `−α (uᵀΣu)^{α/2−1} Σu`; singular at the origin unless α = 2.
    fn grad_log_abs_cf(&self, u: &[f64]) -> Result<Vec<f64>, TargetError> {
        let su = self.sigma.apply(u);
        let q = dot(u, &su);
        if self.alpha == 2.0 {
            return Ok(su.iter().map(|v| -2.0 * v).collect());
        }
        if !(q > 0.0) {
            return Err(TargetError::Singular(u.to_vec()));
        }
        let factor = -self.alpha * q.powf(0.5 * self.alpha - 1.0);
        let g: Vec<f64> = su.iter().map(|v| factor * v).collect();
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(TargetError::Singular(u.to_vec()))
        }
    }

    fn phase(&self, u: &[f64]) -> Complex64 {
        Complex64::from_polar(1.0, dot(u, &self.mu))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EllipticalKind {
    Cauchy,
    Gaussian,
}

/// Original-domain density of an ECSD law where it has a closed form:
/// α = 1 (multivariate Cauchy) and α = 2 (normal with covariance 2Σ).
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalDensity {
    params: EcsdParams,
    kind: EllipticalKind,
    log_norm: f64,
}

impl EllipticalDensity {
    pub fn cauchy(params: EcsdParams) -> Result<Self, TargetError> {
        if params.alpha != 1.0 {
            return Err(TargetError::Unsupported(format!(
                "closed-form Cauchy density needs alpha = 1, got {}",
                params.alpha
            )));
        }
        let d = params.dim() as f64;
        let h = 0.5 * (d + 1.0);
        let log_norm = log_gamma(h)? - h * PI.ln() - 0.5 * params.sigma.log_det();
        Ok(Self {
            params,
            kind: EllipticalKind::Cauchy,
            log_norm,
        })
    }

    pub fn gaussian(params: EcsdParams) -> Result<Self, TargetError> {
        if params.alpha != 2.0 {
            return Err(TargetError::Unsupported(format!(
                "closed-form Gaussian density needs alpha = 2, got {}",
                params.alpha
            )));
        }
        let d = params.dim() as f64;
        // covariance 2Σ
        let log_norm = -0.5 * d * (4.0 * PI).ln() - 0.5 * params.sigma.log_det();
        Ok(Self {
            params,
            kind: EllipticalKind::Gaussian,
            log_norm,
        })
    }

    /// Whichever closed form applies to `params.alpha`.
    pub fn for_params(params: EcsdParams) -> Result<Self, TargetError> {
        match params.alpha {
            a if a == 1.0 => Self::cauchy(params),
            a if a == 2.0 => Self::gaussian(params),
            a => Err(TargetError::Unsupported(format!(
                "no closed-form density for alpha = {a}"
            ))),
        }
    }

    pub fn params(&self) -> &EcsdParams {
        &self.params
    }

    fn centered(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.params.mu).map(|(a, b)| a - b).collect()
    }
}

impl LogDensity for EllipticalDensity {
    fn dim(&self) -> usize {
        self.params.dim()
    }

    /// Normalized log-density.
    fn log_density(&self, x: &[f64]) -> f64 {
        let z = self.centered(x);
        let q = self.params.sigma.inverse_quad_form(&z);
        match self.kind {
            EllipticalKind::Cauchy => {
                self.log_norm - 0.5 * (self.dim() as f64 + 1.0) * q.ln_1p()
            }
            EllipticalKind::Gaussian => self.log_norm - 0.25 * q,
        }
    }

    fn grad_log_density(&self, x: &[f64]) -> Result<Vec<f64>, TargetError> {
        let z = self.centered(x);
        let w = self.params.sigma.apply_inverse(&z);
        let factor = match self.kind {
            EllipticalKind::Cauchy => {
                -(self.dim() as f64 + 1.0) / (1.0 + dot(&z, &w))
            }
            EllipticalKind::Gaussian => -0.5,
        };
        Ok(w.iter().map(|v| factor * v).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{QuadratureGrid, QuadratureRule};
    use crate::targets::finite_difference_gradient;
    use approx::assert_relative_eq;

    fn one_dim(alpha: f64, sigma: f64, mu: f64) -> EcsdParams {
        EcsdParams::new(alpha, SpdMatrix::scalar(sigma).unwrap(), vec![mu]).unwrap()
    }

    #[test]
    fn cf_examples() {
        let p = one_dim(2.0, 1.0, 0.0);
        assert_eq!(p.cf(&[0.0]), Complex64::new(1.0, 0.0));
        assert_relative_eq!(p.cf(&[1.0]).re, (-1.0f64).exp(), max_relative = 1e-15);
        let p = one_dim(1.0, 1.0, 1.0);
        let v = p.cf(&[2.0]);
        assert_relative_eq!(v.norm(), (-2.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(v.arg(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn gradient_examples() {
        let p = EcsdParams::centered(2.0, SpdMatrix::identity(2)).unwrap();
        assert_eq!(p.grad_log_abs_cf(&[1.0, 1.0]).unwrap(), vec![-2.0, -2.0]);
        let p = one_dim(1.5, 1.0, 0.0);
        assert_relative_eq!(p.grad_log_abs_cf(&[4.0]).unwrap()[0], -3.0, max_relative = 1e-14);
        assert!(matches!(
            p.grad_log_abs_cf(&[0.0]),
            Err(TargetError::Singular(_))
        ));
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let sigma = SpdMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let p = EcsdParams::centered(1.3, sigma).unwrap();
        let u = [0.7, -0.4];
        let g = p.grad_log_abs_cf(&u).unwrap();
        let fd = finite_difference_gradient(|x| p.log_abs_cf(x), &u, 1e-5);
        for (a, b) in g.iter().zip(&fd) {
            assert_relative_eq!(a, b, max_relative = 1e-6);
        }
    }

    #[test]
    fn cauchy_density_values() {
        let p = one_dim(1.0, 1.0, 0.0);
        assert_relative_eq!(p.cauchy_density(&[0.0]).unwrap(), 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(p.cauchy_density(&[1.0]).unwrap(), 0.5 / PI, max_relative = 1e-14);
        assert!(one_dim(1.5, 1.0, 0.0).cauchy_density(&[0.0]).is_err());
    }

    #[test]
    fn cauchy_mass_on_box() {
        let p = EcsdParams::centered(1.0, SpdMatrix::identity(2)).unwrap();
        let dens = EllipticalDensity::cauchy(p).unwrap();
        let grid =
            QuadratureGrid::cube(2, -50.0, 50.0, 801, QuadratureRule::GaussLegendre).unwrap();
        let (mass, _) = grid.integrate_real(|x| dens.log_density(x).exp()).unwrap();
        // disc mass is 1 − 1/sqrt(1 + R²); the box sits between the inscribed
        // and circumscribed discs
        let inner = 1.0 - 1.0 / (1.0f64 + 2500.0).sqrt();
        let outer = 1.0 - 1.0 / (1.0f64 + 5000.0).sqrt();
        assert!(mass > inner && mass < outer, "mass {mass}");
        // 50-digit adaptive quadrature of the same box
        assert!((mass - 0.981_996_673_957_200_6).abs() < 1e-6, "mass {mass}");
    }

    #[test]
    fn gaussian_density_is_normalized() {
        let p = one_dim(2.0, 0.7, 0.3);
        let dens = EllipticalDensity::gaussian(p).unwrap();
        let grid = QuadratureGrid::cube(1, -20.0, 20.0, 401, QuadratureRule::GaussLegendre).unwrap();
        let (mass, _) = grid.integrate_real(|x| dens.log_density(x).exp()).unwrap();
        assert_relative_eq!(mass, 1.0, max_relative = 1e-12);
        let g = dens.grad_log_density(&[1.3]).unwrap();
        assert_relative_eq!(g[0], -(1.3 - 0.3) / 1.4, max_relative = 1e-14);
    }
}
