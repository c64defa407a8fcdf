use std::f64::consts::PI;

use num_complex::Complex64;

use super::{iid_summary, weighted_summary, EstimateReport, EstimatorError, IidSample, NormalizingConstant};
use crate::samplers::{MarkovChainTrace, WeightScheme};
use crate::targets::CharacteristicTarget;

/// `F[g](−x) F[π](x)/|F[π](x)|` at every point.
fn spectral_terms<'a>(
    points: impl Iterator<Item = &'a [f64]>,
    fg: &dyn Fn(&[f64]) -> Complex64,
    target: &dyn CharacteristicTarget,
) -> Result<Vec<Complex64>, EstimatorError> {
    let mut neg = Vec::new();
    points
        .map(|x| {
            if target.log_abs_cf(x) == f64::NEG_INFINITY {
                return Err(EstimatorError::ZeroModulus(x.to_vec()));
            }
            neg.clear();
            neg.extend(x.iter().map(|v| -v));
            Ok(fg(&neg) * target.phase(x))
        })
        .collect()
}

fn prefactor(c_p: &NormalizingConstant, d: usize) -> f64 {
    c_p.value / (2.0 * PI).powi(d as i32)
}

/// `V ≈ C_p/(2π)^d Σ ω_k F[g](−X_k) F[π](X_k)/|F[π](X_k)|` over the
/// effective states of a chain on `p ∝ |F[π]|`; `fg` evaluates `F[g]`.
pub fn parseval_weighted_estimate(
    trace: &MarkovChainTrace,
    fg: &dyn Fn(&[f64]) -> Complex64,
    target: &dyn CharacteristicTarget,
    c_p: &NormalizingConstant,
) -> Result<EstimateReport, EstimatorError> {
    if trace.dim() != target.dim() {
        return Err(EstimatorError::Dimension {
            expected: target.dim(),
            got: trace.dim(),
        });
    }
    if trace.effective() == 0 {
        return Err(EstimatorError::EmptySample);
    }
    let terms = spectral_terms(trace.effective_states(), fg, target)?;
    let (mean, se) = weighted_summary(&terms, trace.step_weights())?;
    let k = prefactor(c_p, target.dim());
    Ok(EstimateReport::new(mean * k, se * k, trace.effective(), trace.weight_scheme(), Some(*c_p)))
}

/// The same identity averaged over i.i.d. draws from `p`.
pub fn fourier_iid_estimate(
    sample: &IidSample,
    fg: &dyn Fn(&[f64]) -> Complex64,
    target: &dyn CharacteristicTarget,
    c_p: &NormalizingConstant,
) -> Result<EstimateReport, EstimatorError> {
    if sample.dim() != target.dim() {
        return Err(EstimatorError::Dimension {
            expected: target.dim(),
            got: sample.dim(),
        });
    }
    let terms = spectral_terms(sample.points(), fg, target)?;
    let (mean, se) = iid_summary(&terms)?;
    let k = prefactor(c_p, target.dim());
    Ok(EstimateReport::new(mean * k, se * k, sample.len(), WeightScheme::Uniform, Some(*c_p)))
}

/// `(1/n) Σ g(X_i)` over i.i.d. draws from `π`.
pub fn original_domain_mc_estimate(sample: &IidSample, g: &dyn Fn(&[f64]) -> f64) -> Result<EstimateReport, EstimatorError> {
    let terms: Vec<Complex64> = sample.points().map(|x| Complex64::new(g(x), 0.0)).collect();
    let (mean, se) = iid_summary(&terms)?;
    Ok(EstimateReport::new(mean, se, sample.len(), WeightScheme::Uniform, None))
}

/// Weighted average of `g` over a chain run on `π` itself.
pub fn original_domain_trace_estimate(
    trace: &MarkovChainTrace,
    g: &dyn Fn(&[f64]) -> f64,
) -> Result<EstimateReport, EstimatorError> {
    if trace.effective() == 0 {
        return Err(EstimatorError::EmptySample);
    }
    let terms: Vec<Complex64> = trace.effective_states().map(|x| Complex64::new(g(x), 0.0)).collect();
    let (mean, se) = weighted_summary(&terms, trace.step_weights())?;
    Ok(EstimateReport::new(mean, se, trace.effective(), trace.weight_scheme(), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{mepd_normalizing_constant, sample_ecsd, sample_mepd, CpProvenance};
    use crate::numerics::{RngStream, SpdMatrix};
    use crate::samplers::{run_mala, run_mh, Proposal, StepSchedule};
    use crate::targets::{sech_payoff, sech_payoff_ft, EcsdParams, Spectral};

    fn sech_ft(u: &[f64]) -> Complex64 {
        Complex64::new(sech_payoff_ft(u), 0.0)
    }

    #[test]
    fn null_transform_gives_zero() {
        let p = EcsdParams::centered(1.0, SpdMatrix::identity(1)).unwrap();
        let cp = mepd_normalizing_constant(1.0, p.sigma()).unwrap();
        let t = run_mh(&Spectral(&p), &Proposal::random_walk(1, 1.0).unwrap(), &[0.0], 10, 100, &mut RngStream::new(1, 0)).unwrap();
        let r = parseval_weighted_estimate(&t, &|_| Complex64::new(0.0, 0.0), &p, &cp).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn spectral_cauchy_matches_quadrature() {
        // (1/2π)∫ F[g](−u) e^{−|u|} du, 50-digit quadrature
        let truth = 0.500740496389986;
        let p = EcsdParams::centered(1.0, SpdMatrix::identity(1)).unwrap();
        let cp = mepd_normalizing_constant(1.0, p.sigma()).unwrap();
        let t = run_mh(&Spectral(&p), &Proposal::random_walk(1, 2.0).unwrap(), &[0.0], 5000, 100_000, &mut RngStream::new(2, 0)).unwrap();
        let r = parseval_weighted_estimate(&t, &sech_ft, &p, &cp).unwrap();
        assert!((r.value - truth).abs() < 3.0 * r.std_error, "{} ± {}", r.value, r.std_error);
        assert_eq!(r.weight_scheme, WeightScheme::Uniform);
        assert_eq!(r.c_p_provenance, CpProvenance::ClosedForm);
        assert!(r.imag_residual.abs() < 1e-12);
    }

    #[test]
    fn frozen_chain_is_exact() {
        let p = EcsdParams::new(1.5, SpdMatrix::identity(1), vec![0.7]).unwrap();
        let cp = mepd_normalizing_constant(1.5, p.sigma()).unwrap();
        let x = 0.9;
        let t = MarkovChainTrace::from_parts(1, vec![x; 31], vec![false; 30], 10, vec![1.0; 20], WeightScheme::Uniform).unwrap();
        let r = parseval_weighted_estimate(&t, &sech_ft, &p, &cp).unwrap();
        let expect = cp.value / (2.0 * PI) * sech_ft(&[-x]) * p.phase(&[x]);
        assert!((r.value - expect.re).abs() < 1e-15 * expect.norm());
        assert!((r.imag_residual - expect.im).abs() < 1e-15 * expect.norm());
    }

    #[test]
    fn mala_weights_and_linearity() {
        let p = EcsdParams::centered(1.5, SpdMatrix::identity(2)).unwrap();
        let cp = mepd_normalizing_constant(1.5, p.sigma()).unwrap();
        let gammas: Vec<f64> = (1..=3000).map(|k| 0.5 / (k as f64).sqrt()).collect();
        let sched = StepSchedule::sequence(gammas).unwrap();
        let t = run_mala(&Spectral(&p), &sched, &[0.1, 0.1], 1000, 2000, &mut RngStream::new(3, 0)).unwrap();
        let total: f64 = t.step_weights().iter().sum();
        let norm_sum: f64 = t.step_weights().iter().map(|w| w / total).sum();
        assert!((norm_sum - 1.0).abs() < 1e-14);
        let f1 = |u: &[f64]| Complex64::new(sech_payoff_ft(u), 0.0);
        let f2 = |u: &[f64]| Complex64::new((-u[0] * u[0]).exp(), u[1]);
        let (a, b) = (2.5, -0.75);
        let combo = |u: &[f64]| f1(u) * a + f2(u) * b;
        let r1 = parseval_weighted_estimate(&t, &f1, &p, &cp).unwrap();
        let r2 = parseval_weighted_estimate(&t, &f2, &p, &cp).unwrap();
        let rc = parseval_weighted_estimate(&t, &combo, &p, &cp).unwrap();
        let lin = a * r1.value + b * r2.value;
        assert!((rc.value - lin).abs() <= 1e-13 * lin.abs().max(1.0));
        assert_eq!(rc.weight_scheme, WeightScheme::StepSize);
    }

    #[test]
    fn iid_gaussian_matches_quadrature() {
        let truth = 0.549059055700073;
        let p = EcsdParams::centered(2.0, SpdMatrix::identity(1)).unwrap();
        let cp = mepd_normalizing_constant(2.0, p.sigma()).unwrap();
        let s = sample_mepd(2.0, p.sigma(), 100_000, &mut RngStream::new(4, 0)).unwrap();
        let r = fourier_iid_estimate(&s, &sech_ft, &p, &cp).unwrap();
        assert!((r.value - truth).abs() < 3.0 * r.std_error, "{} ± {}", r.value, r.std_error);
    }

    #[test]
    fn constant_transform_and_duplicates() {
        let p = EcsdParams::centered(1.2, SpdMatrix::identity(2)).unwrap();
        let cp = mepd_normalizing_constant(1.2, p.sigma()).unwrap();
        let s = sample_mepd(1.2, p.sigma(), 1000, &mut RngStream::new(5, 0)).unwrap();
        let c = 3.0;
        let r = fourier_iid_estimate(&s, &|_| Complex64::new(c, 0.0), &p, &cp).unwrap();
        let expect = c * cp.value / (2.0 * PI).powi(2);
        assert!((r.value - expect).abs() < 1e-14 * expect);
        let doubled: Vec<f64> = s.points().flat_map(|x| x.iter().chain(x.iter()).copied().collect::<Vec<_>>()).collect();
        let dup = IidSample::new(2, doubled.chunks(2).flat_map(|c| c.to_vec()).collect(), s.tag()).unwrap();
        let r1 = fourier_iid_estimate(&s, &sech_ft, &p, &cp).unwrap();
        let r2 = fourier_iid_estimate(&dup, &sech_ft, &p, &cp).unwrap();
        assert!((r1.value - r2.value).abs() < 1e-13 * r1.value.abs());
    }

    #[test]
    fn original_domain_examples() {
        let p = EcsdParams::centered(2.0, SpdMatrix::identity(1)).unwrap();
        let s = sample_ecsd(&p, 100_000, &mut RngStream::new(6, 0)).unwrap();
        let one = original_domain_mc_estimate(&s, &|_| 1.0).unwrap();
        assert_eq!(one.value, 1.0);
        let odd = original_domain_mc_estimate(&s, &|x| x[0].powi(3)).unwrap();
        assert!(odd.value.abs() < 3.0 * odd.std_error);
        assert_eq!(one.c_p_provenance, CpProvenance::None);
    }

    #[test]
    fn parseval_consistency_gaussian() {
        let p = EcsdParams::centered(2.0, SpdMatrix::new(2, vec![1.0, 0.2, 0.2, 0.6]).unwrap()).unwrap();
        let cp = mepd_normalizing_constant(2.0, p.sigma()).unwrap();
        for seed in 0..10u64 {
            let mut rng = RngStream::new(seed, 7);
            let f = fourier_iid_estimate(&sample_mepd(2.0, p.sigma(), 20_000, &mut rng).unwrap(), &sech_ft, &p, &cp).unwrap();
            let o = original_domain_mc_estimate(&sample_ecsd(&p, 20_000, &mut rng).unwrap(), &sech_payoff).unwrap();
            let se = (f.std_error.powi(2) + o.std_error.powi(2)).sqrt();
            assert!((f.value - o.value).abs() < 3.0 * se, "seed {seed}: {} vs {}", f.value, o.value);
            assert!(f.imag_residual.abs() < 3.0 * f.std_error);
        }
    }

    #[test]
    fn refuses_empty_window() {
        let p = EcsdParams::centered(1.0, SpdMatrix::identity(1)).unwrap();
        let cp = mepd_normalizing_constant(1.0, p.sigma()).unwrap();
        let t = run_mh(&Spectral(&p), &Proposal::random_walk(1, 1.0).unwrap(), &[0.0], 10, 0, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(parseval_weighted_estimate(&t, &sech_ft, &p, &cp), Err(EstimatorError::EmptySample));
    }
}
