use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::SamplerError;
use crate::numerics::{log_gamma, RngStream, SpdMatrix};

/// Proposal kernels `q(x, ·)` for Metropolis–Hastings.
#[derive(Debug, Clone, PartialEq)]
pub enum Proposal {
    /// `y = x + σ ⊙ Z`, symmetric.
    RandomWalk { scale: Vec<f64> },
    /// `y ~ N(mean, cov)` independent of `x`.
    Independence { mean: Vec<f64>, cov: SpdMatrix },
    /// Independent coordinates with density
    /// `exp(−|u|^α/θ) / (2 θ^{1/α} Γ(1 + 1/α))`.
    GeneralizedGaussian { alpha: f64, theta: f64, dim: usize },
}

impl Proposal {
    pub fn random_walk(dim: usize, scale: f64) -> Result<Self, SamplerError> {
        Self::random_walk_per_axis(vec![scale; dim])
    }

    pub fn random_walk_per_axis(scale: Vec<f64>) -> Result<Self, SamplerError> {
        if scale.is_empty() || scale.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(SamplerError::InvalidProposal(format!(
                "random-walk scales must be positive and finite, got {scale:?}"
            )));
        }
        Ok(Proposal::RandomWalk { scale })
    }

    pub fn independence(mean: Vec<f64>, cov: SpdMatrix) -> Result<Self, SamplerError> {
        if mean.len() != cov.dim() {
            return Err(SamplerError::Dimension {
                expected: cov.dim(),
                got: mean.len(),
            });
        }
        Ok(Proposal::Independence { mean, cov })
    }

    pub fn generalized_gaussian(dim: usize, alpha: f64, theta: f64) -> Result<Self, SamplerError> {
        if dim == 0 || !(alpha > 0.0) || !(theta > 0.0) {
            return Err(SamplerError::InvalidProposal(format!(
                "generalized Gaussian needs d >= 1, alpha > 0, theta > 0; got d={dim}, alpha={alpha}, theta={theta}"
            )));
        }
        Ok(Proposal::GeneralizedGaussian { alpha, theta, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Proposal::RandomWalk { scale } => scale.len(),
            Proposal::Independence { mean, .. } => mean.len(),
            Proposal::GeneralizedGaussian { dim, .. } => *dim,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, Proposal::RandomWalk { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Proposal::RandomWalk { .. } => "random-walk-gaussian",
            Proposal::Independence { .. } => "independence-gaussian",
            Proposal::GeneralizedGaussian { .. } => "generalized-gaussian",
        }
    }

    /// `log q(x, y)`, the log-density of proposing `y` from `x`.
    pub fn log_density(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Proposal::RandomWalk { scale } => x
                .iter()
                .zip(y)
                .zip(scale)
                .map(|((a, b), s)| {
                    let z = (b - a) / s;
                    -0.5 * z * z - s.ln() - 0.5 * (2.0 * PI).ln()
                })
                .sum(),
            Proposal::Independence { mean, cov } => {
                let z: Vec<f64> = y.iter().zip(mean).map(|(a, b)| a - b).collect();
                -0.5 * cov.inverse_quad_form(&z)
                    - 0.5 * cov.log_det()
                    - 0.5 * y.len() as f64 * (2.0 * PI).ln()
            }
            Proposal::GeneralizedGaussian { alpha, theta, .. } => {
                generalized_gaussian_log_density(*alpha, *theta, y)
            }
        }
    }

    pub fn draw(&self, x: &[f64], rng: &mut RngStream) -> Vec<f64> {
        match self {
            Proposal::RandomWalk { scale } => x
                .iter()
                .zip(scale)
                .map(|(a, s)| {
                    let z: f64 = StandardNormal.sample(rng);
                    a + s * z
                })
                .collect(),
            Proposal::Independence { mean, cov } => {
                let z: Vec<f64> = (0..mean.len()).map(|_| StandardNormal.sample(rng)).collect();
                cov.sqrt_apply(&z)
                    .into_iter()
                    .zip(mean)
                    .map(|(a, m)| a + m)
                    .collect()
            }
            Proposal::GeneralizedGaussian { alpha, theta, dim } => {
                draw_generalized_gaussian(*alpha, *theta, *dim, rng)
            }
        }
    }
}

/// Product over coordinates of `exp(−|uₖ|^α/θ) / (2 θ^{1/α} Γ(1 + 1/α))`.
pub fn generalized_gaussian_log_density(alpha: f64, theta: f64, u: &[f64]) -> f64 {
    let log_norm = (2.0f64).ln()
        + theta.ln() / alpha
        + log_gamma(1.0 + 1.0 / alpha).expect("positive argument");
    u.iter()
        .map(|v| -v.abs().powf(alpha) / theta - log_norm)
        .sum()
}

/// `|u|^α/θ ~ Gamma(1/α, 1)` with a fair random sign.
pub fn draw_generalized_gaussian(alpha: f64, theta: f64, dim: usize, rng: &mut RngStream) -> Vec<f64> {
    let shape = Gamma::new(1.0 / alpha, 1.0).expect("positive shape");
    (0..dim)
        .map(|_| {
            let t: f64 = shape.sample(rng);
            let r = (theta * t).powf(1.0 / alpha);
            if rng.random::<bool>() {
                r
            } else {
                -r
            }
        })
        .collect()
}
