use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::{EstimatorError, GeneratorTag, IidSample};
use crate::numerics::{norm, RngStream, SpdMatrix};
use crate::samplers::Proposal;
use crate::targets::EcsdParams;

/// Positive stable draw with `E[e^{−sA}] = e^{−s^{α′}}` (Kanter's form of the
/// totally skewed Chambers–Mallows–Stuck transform).
pub fn sample_one_sided_stable(alpha_prime: f64, rng: &mut RngStream) -> f64 {
    debug_assert!(alpha_prime > 0.0 && alpha_prime < 1.0);
    let a = alpha_prime;
    loop {
        let v = std::f64::consts::PI * rng.random::<f64>();
        let e: f64 = Exp1.sample(rng);
        if v == 0.0 || e == 0.0 {
            continue;
        }
        let left = (a * v).sin() / v.sin().powf(1.0 / a);
        let right = (((1.0 - a) * v).sin() / e).powf((1.0 - a) / a);
        let x = left * right;
        if x > 0.0 && x.is_finite() {
            return x;
        }
    }
}

/// `X = μ + √(2A) Σ^{1/2} Z` with `A` the `α/2` positive stable law, so the
/// characteristic function is exactly `exp(−(uᵀΣu)^{α/2} + iuᵀμ)`.
pub fn sample_ecsd(params: &EcsdParams, n: usize, rng: &mut RngStream) -> Result<IidSample, EstimatorError> {
    let d = params.sigma().dim();
    let alpha = params.alpha();
    let mut points = Vec::with_capacity(n * d);
    for _ in 0..n {
        let a = if alpha == 2.0 {
            1.0
        } else {
            sample_one_sided_stable(0.5 * alpha, rng)
        };
        let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let scale = (2.0 * a).sqrt();
        let lz = params.sigma().sqrt_apply(&z);
        points.extend(lz.iter().zip(params.mu()).map(|(v, m)| m + scale * v));
    }
    IidSample::new(d, points, GeneratorTag::EcsdDirect)
}

/// Draws from `p(u) ∝ exp(−(uᵀΣu)^{α/2})`: with `Σ = LLᵀ`, `v = Lᵀu` has
/// radius `T^{1/α}`, `T ~ Gamma(d/α, 1)`, and a uniform direction.
pub fn sample_mepd(alpha: f64, sigma: &SpdMatrix, n: usize, rng: &mut RngStream) -> Result<IidSample, EstimatorError> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(EstimatorError::InvalidParameter(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    let d = sigma.dim();
    let radial = Gamma::new(d as f64 / alpha, 1.0).map_err(|e| EstimatorError::InvalidParameter(e.to_string()))?;
    let mut points = Vec::with_capacity(n * d);
    for _ in 0..n {
        let t: f64 = radial.sample(rng);
        let r = t.powf(1.0 / alpha);
        let dir = loop {
            let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            let nz = norm(&z);
            if nz > 0.0 {
                break z.into_iter().map(|v| v / nz).collect::<Vec<f64>>();
            }
        };
        let v: Vec<f64> = dir.iter().map(|c| r * c).collect();
        points.extend(sigma.solve_upper(&v));
    }
    IidSample::new(d, points, GeneratorTag::MepdDirect)
}

/// Per-coordinate generalized Gaussian draws (the CGMY importance density).
pub fn sample_generalized_gaussian(
    dim: usize,
    alpha_q: f64,
    theta: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<IidSample, EstimatorError> {
    let q = Proposal::generalized_gaussian(dim, alpha_q, theta)
        .map_err(|e| EstimatorError::InvalidParameter(e.to_string()))?;
    let origin = vec![0.0; dim];
    let mut points = Vec::with_capacity(n * dim);
    for _ in 0..n {
        points.extend(q.draw(&origin, rng));
    }
    IidSample::new(dim, points, GeneratorTag::GeneralizedGaussian)
}
