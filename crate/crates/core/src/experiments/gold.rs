use std::f64::consts::PI;

use rayon::prelude::*;

use super::{numerical, replicate_stream, ExperimentError, ExperimentKind};
use crate::estimators::{sample_ecsd, EstimatorError};
use crate::numerics::{QuadratureGrid, QuadratureRule};
use crate::targets::{sech_payoff, sech_payoff_ft, CharacteristicTarget, EcsdParams};

/// Largest block of draws held in memory at once.
const BLOCK: usize = 100_000;

/// Reference value of a panel, with the method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldEstimate {
    pub d: usize,
    pub params: String,
    pub value: f64,
    pub std_error: f64,
    /// `iid-original`, `quadrature` or `importance-sampling`.
    pub source: String,
    /// Independent quadrature value and its error proxy, when available.
    pub quadrature: Option<(f64, f64)>,
}

/// `E_π[sech payoff]` for an ECSD law in `d ≤ 2` through the Fourier-side
/// integral `(2π)^{−d} ∫ F[g](−u) F[π](u) du`, graded orthant Gauss–Legendre
/// with `u = L t³`. Returns the value and its difference against half the nodes.
pub fn ecsd_sech_quadrature(params: &EcsdParams) -> Result<(f64, f64), EstimatorError> {
    let d = params.dim();
    if d > 2 {
        return Err(EstimatorError::InvalidParameter(format!("sech quadrature needs d <= 2, got d={d}")));
    }
    let lim = 50f64.powf(1.0 / params.alpha()) / params.sigma().min_eigenvalue().sqrt();
    let signs: Vec<Vec<f64>> = (0..1usize << d)
        .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect();
    let integrate = |nodes: usize| -> Result<f64, EstimatorError> {
        let grid = QuadratureGrid::cube(d, 0.0, 1.0, nodes, QuadratureRule::GaussLegendre)?;
        let (v, _) = grid.integrate_real(|t| {
            let jac: f64 = t.iter().map(|s| 3.0 * lim * s * s).product();
            let mut u = vec![0.0; d];
            let mut acc = 0.0;
            for sg in &signs {
                for k in 0..d {
                    u[k] = sg[k] * lim * t[k].powi(3);
                }
                acc += sech_payoff_ft(&u) * params.cf(&u).re;
            }
            acc * jac
        })?;
        Ok(v / (2.0 * PI).powi(d as i32))
    };
    let nodes = if d == 1 { 800 } else { 400 };
    let fine = integrate(nodes)?;
    let coarse = integrate(nodes / 2)?;
    Ok((fine, (fine - coarse).abs()))
}

/// Plain Monte Carlo of the sech payoff under `π` with `total` draws split
/// into `chunks` equal chunks; returns the mean and its standard error.
pub(crate) fn iid_sech_gold(
    params: &EcsdParams,
    total: usize,
    chunks: usize,
    seed: u64,
    kind: ExperimentKind,
    panel: &str,
) -> Result<(f64, f64), ExperimentError> {
    let d = params.dim();
    let per_chunk = total / chunks;
    let blocks = per_chunk.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..chunks * blocks)
        .into_par_iter()
        .map(|job| {
            let (chunk, block) = (job / blocks, job % blocks);
            let size = BLOCK.min(per_chunk - block * BLOCK);
            let mut rng = replicate_stream(seed, kind, d, panel, "gold", "original", "gold", block, chunk);
            let sample = sample_ecsd(params, size, &mut rng).map_err(numerical)?;
            Ok(sample.points().fold((0.0, 0.0), |(s, s2), x| {
                let g = sech_payoff(x);
                (s + g, s2 + g * g)
            }))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let n = (per_chunk * chunks) as f64;
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Gold estimate of the sech payoff, cross-checked by quadrature for `d ≤ 2`.
/// A disagreement beyond five combined standard errors is a numerical failure.
pub(crate) fn sech_gold(
    params: &EcsdParams,
    total: usize,
    chunks: usize,
    seed: u64,
    kind: ExperimentKind,
    panel: &str,
) -> Result<GoldEstimate, ExperimentError> {
    let d = params.dim();
    let (value, std_error) = iid_sech_gold(params, total, chunks, seed, kind, panel)?;
    let quadrature = if d <= 2 {
        let (q, err) = ecsd_sech_quadrature(params).map_err(numerical)?;
        let tol = 5.0 * (std_error * std_error + err * err).sqrt() + 1e-12;
        if (value - q).abs() > tol {
            return Err(ExperimentError::Numerical(format!(
                "gold estimate {value} (se {std_error}) disagrees with quadrature {q} (err {err}) for d={d}, {panel}"
            )));
        }
        Some((q, err))
    } else {
        None
    };
    Ok(GoldEstimate {
        d,
        params: panel.to_string(),
        value,
        std_error,
        source: "iid-original".into(),
        quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SpdMatrix;

    #[test]
    fn quadrature_matches_frozen_values() {
        // Gaussian d=1, Σ=1: E sech(√(π/2) X) with X ~ N(0, 2), closed form
        // by the same Parseval integral done independently at 50 digits
        let p = EcsdParams::centered(2.0, SpdMatrix::identity(1)).unwrap();
        let (v, err) = ecsd_sech_quadrature(&p).unwrap();
        assert!(err < 1e-12);
        let direct = {
            let grid = QuadratureGrid::cube(1, -40.0, 40.0, 4001, QuadratureRule::GaussLegendre).unwrap();
            grid.integrate_real(|x| sech_payoff(x) * (-x[0] * x[0] / 4.0).exp() / (4.0 * PI).sqrt()).unwrap().0
        };
        assert!((v - direct).abs() < 1e-12, "{v} vs {direct}");
    }

    #[test]
    fn cauchy_quadrature_matches_original_domain_integral() {
        let p = EcsdParams::centered(1.0, SpdMatrix::scalar(0.2).unwrap()).unwrap();
        let (v, err) = ecsd_sech_quadrature(&p).unwrap();
        assert!(err < 1e-9);
        // ∫ sech(√(π/2)x) · (√0.2/π)/(0.2 + x²) dx, smooth and rapidly decaying
        let s = 0.2f64.sqrt();
        let grid = QuadratureGrid::cube(1, -60.0, 60.0, 6001, QuadratureRule::GaussLegendre).unwrap();
        let direct = grid.integrate_real(|x| sech_payoff(x) * s / (PI * (0.2 + x[0] * x[0]))).unwrap().0;
        assert!((v - direct).abs() < 1e-10, "{v} vs {direct}");
    }

    #[test]
    fn gold_for_one_dimensional_cauchy_agrees_with_quadrature() {
        let p = EcsdParams::centered(1.0, SpdMatrix::scalar(0.2).unwrap()).unwrap();
        let g = sech_gold(&p, 400_000, 20, 11, ExperimentKind::McmcCauchy, "alpha=1").unwrap();
        let (q, _) = g.quadrature.unwrap();
        assert!((g.value - q).abs() < 3.0 * g.std_error, "{} ± {} vs {q}", g.value, g.std_error);
    }
}
