use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::mh::acceptance_probability;
use super::{MarkovChainTrace, SamplerError, WeightScheme};
use crate::numerics::RngStream;
use crate::targets::{LogDensity, TargetError};

/// Step sizes `γ_1, γ_2, …` for MALA.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    Sequence(Vec<f64>),
}

impl StepSchedule {
    pub fn constant(gamma: f64) -> Result<Self, SamplerError> {
        let s = StepSchedule::Constant(gamma);
        s.validate(0)?;
        Ok(s)
    }

    pub fn sequence(gammas: Vec<f64>) -> Result<Self, SamplerError> {
        let s = StepSchedule::Sequence(gammas);
        s.validate(0)?;
        Ok(s)
    }

    /// `γ_k`, `k ≥ 1`.
    pub fn gamma(&self, k: usize) -> f64 {
        match self {
            StepSchedule::Constant(g) => *g,
            StepSchedule::Sequence(v) => v[k - 1],
        }
    }

    fn validate(&self, steps: usize) -> Result<(), SamplerError> {
        let ok = |g: f64| g > 0.0 && g.is_finite();
        match self {
            StepSchedule::Constant(g) if !ok(*g) => Err(SamplerError::InvalidSchedule(format!(
                "step size must be positive and finite, got {g}"
            ))),
            StepSchedule::Sequence(v) => {
                if let Some(g) = v.iter().find(|g| !ok(**g)) {
                    return Err(SamplerError::InvalidSchedule(format!(
                        "step sizes must be positive and finite, got {g}"
                    )));
                }
                if v.len() < steps {
                    return Err(SamplerError::InvalidSchedule(format!(
                        "sequence has {} steps, chain needs {steps}",
                        v.len()
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// The Langevin kernel `N(x + γ∇log p(x), 2γ I)`.
pub struct LangevinKernel<'a> {
    target: &'a dyn LogDensity,
    gamma: f64,
}

impl<'a> LangevinKernel<'a> {
    pub fn new(target: &'a dyn LogDensity, gamma: f64) -> Self {
        LangevinKernel { target, gamma }
    }

    pub fn mean(&self, x: &[f64]) -> Result<Vec<f64>, TargetError> {
        let g = self.target.grad_log_density(x)?;
        Ok(drift(x, &g, self.gamma))
    }

    /// `log Q(x, y)`.
    pub fn log_density(&self, x: &[f64], y: &[f64]) -> Result<f64, TargetError> {
        Ok(gaussian_log_kernel(&self.mean(x)?, y, self.gamma))
    }

    /// MH acceptance of `x → y` under this kernel.
    pub fn acceptance(&self, x: &[f64], y: &[f64]) -> Result<f64, TargetError> {
        Ok(acceptance_probability(
            self.target.log_density(x),
            self.target.log_density(y),
            self.log_density(x, y)?,
            self.log_density(y, x)?,
        ))
    }

    pub fn draw(&self, x: &[f64], rng: &mut RngStream) -> Result<Vec<f64>, TargetError> {
        let m = self.mean(x)?;
        let s = (2.0 * self.gamma).sqrt();
        Ok(m.into_iter()
            .map(|v| {
                let z: f64 = StandardNormal.sample(rng);
                v + s * z
            })
            .collect())
    }
}

fn drift(x: &[f64], g: &[f64], gamma: f64) -> Vec<f64> {
    x.iter().zip(g).map(|(a, b)| a + gamma * b).collect()
}

fn gaussian_log_kernel(mean: &[f64], y: &[f64], gamma: f64) -> f64 {
    let sq: f64 = mean.iter().zip(y).map(|(m, v)| (v - m) * (v - m)).sum();
    -sq / (4.0 * gamma) - 0.5 * mean.len() as f64 * (4.0 * PI * gamma).ln()
}

fn finite_gradient(g: Result<Vec<f64>, TargetError>, step: usize) -> Result<Vec<f64>, SamplerError> {
    let g = g.map_err(|source| SamplerError::GradientFailure { step, source })?;
    if g.iter().all(|v| v.is_finite()) {
        Ok(g)
    } else {
        Err(SamplerError::GradientFailure {
            step,
            source: TargetError::InvalidParameter(format!("non-finite gradient {g:?}")),
        })
    }
}

/// Runs `N + n` MALA transitions; step `k → k+1` uses `γ_{k+1}`, and the
/// effective sample `X_k` records the `γ_k` that produced it.
pub fn run_mala(
    log_p: &dyn LogDensity,
    sched: &StepSchedule,
    x0: &[f64],
    burn_in: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<MarkovChainTrace, SamplerError> {
    let d = log_p.dim();
    if x0.len() != d {
        return Err(SamplerError::Dimension { expected: d, got: x0.len() });
    }
    sched.validate(burn_in + n)?;
    let mut lp_x = log_p.log_density(x0);
    if !lp_x.is_finite() {
        return Err(SamplerError::NonFiniteStart(x0.to_vec()));
    }
    let mut g_x = finite_gradient(log_p.grad_log_density(x0), 0)?;
    let mut x = x0.to_vec();
    let mut trace = MarkovChainTrace::with_capacity(d, x0, burn_in, n, WeightScheme::StepSize);
    let mut non_finite = 0usize;
    for k in 0..burn_in + n {
        let gamma = sched.gamma(k + 1);
        let s = (2.0 * gamma).sqrt();
        let u: f64 = rng.random();
        let mean_x = drift(&x, &g_x, gamma);
        let y: Vec<f64> = mean_x
            .iter()
            .map(|m| {
                let z: f64 = StandardNormal.sample(rng);
                m + s * z
            })
            .collect();
        let mut accept = false;
        let lp_y = if y.iter().all(|v| v.is_finite()) {
            log_p.log_density(&y)
        } else {
            f64::NAN
        };
        if lp_y.is_finite() {
            let g_y = finite_gradient(log_p.grad_log_density(&y), k + 1)?;
            let lq_xy = gaussian_log_kernel(&mean_x, &y, gamma);
            let lq_yx = gaussian_log_kernel(&drift(&y, &g_y, gamma), &x, gamma);
            let a = acceptance_probability(lp_x, lp_y, lq_xy, lq_yx);
            if u < a {
                accept = true;
                x = y;
                lp_x = lp_y;
                g_x = g_y;
            }
        } else if lp_y.is_nan() {
            non_finite += 1;
        }
        trace.push(&x, accept, gamma);
    }
    if non_finite > 0 {
        trace.warn(format!("{non_finite} non-finite proposals rejected"));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SpdMatrix;
    use crate::targets::{EcsdParams, FnDensity, Spectral};

    #[test]
    fn proposal_mean_for_quadratic() {
        let a = 0.7;
        let target = FnDensity::new(3, move |x: &[f64]| -a * crate::numerics::dot(x, x), move |x: &[f64]| {
            x.iter().map(|v| -2.0 * a * v).collect()
        });
        let gamma = 0.15;
        let k = LangevinKernel::new(&target, gamma);
        let x = [0.4, -1.2, 2.5];
        let m = k.mean(&x).unwrap();
        for (mi, xi) in m.iter().zip(&x) {
            assert!((mi - (1.0 - 2.0 * gamma * a) * xi).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_is_normalized_gaussian() {
        let target = FnDensity::new(1, |x: &[f64]| -x[0].powi(4), |x: &[f64]| vec![-4.0 * x[0].powi(3)]);
        let k = LangevinKernel::new(&target, 0.3);
        let m = k.mean(&[0.8]).unwrap()[0];
        let var = 0.6f64;
        let expect = -(1.1 - m).powi(2) / (2.0 * var) - 0.5 * (2.0 * PI * var).ln();
        assert!((k.log_density(&[0.8], &[1.1]).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn detailed_balance_pointwise() {
        let target = FnDensity::new(
            2,
            |x: &[f64]| -(1.0 + x[0] * x[0] + 0.5 * x[1] * x[1]).ln(),
            |x: &[f64]| {
                let q = 1.0 + x[0] * x[0] + 0.5 * x[1] * x[1];
                vec![-2.0 * x[0] / q, -x[1] / q]
            },
        );
        let k = LangevinKernel::new(&target, 0.4);
        let mut rng = RngStream::new(21, 0);
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| { let z: f64 = StandardNormal.sample(&mut rng); 2.0 * z }).collect();
            let y = k.draw(&x, &mut rng).unwrap();
            let fwd = (target.log_density(&x) + k.log_density(&x, &y).unwrap()).exp() * k.acceptance(&x, &y).unwrap();
            let bwd = (target.log_density(&y) + k.log_density(&y, &x).unwrap()).exp() * k.acceptance(&y, &x).unwrap();
            assert!((fwd - bwd).abs() <= 1e-12 * fwd.max(bwd), "{fwd} vs {bwd}");
        }
    }

    #[test]
    fn tiny_step_nearly_always_accepts() {
        let target = FnDensity::new(1, |x: &[f64]| -0.5 * x[0] * x[0], |x: &[f64]| vec![-x[0]]);
        let sched = StepSchedule::constant(1e-10).unwrap();
        let t = run_mala(&target, &sched, &[0.5], 0, 5000, &mut RngStream::new(3, 0)).unwrap();
        assert!(t.acceptance_rate().unwrap() > 0.99);
        assert!(t.states().all(|x| (x[0] - 0.5).abs() < 1e-2));
    }

    fn second_moment_with_se(t: &MarkovChainTrace) -> (f64, f64) {
        let xs: Vec<f64> = t.effective_states().map(|x| x[0] * x[0]).collect();
        let b = 50;
        let len = xs.len() / b;
        let means: Vec<f64> = xs.chunks(len).map(|w| w.iter().sum::<f64>() / w.len() as f64).collect();
        let m = means.iter().sum::<f64>() / b as f64;
        let v = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64;
        (m, (v / b as f64).sqrt())
    }

    #[test]
    fn spectral_gaussian_second_moment() {
        // α = 2: p ∝ exp(−σ u²), second moment 1/(2σ)
        for (sigma, expect) in [(1.0, 0.5), (0.5, 1.0)] {
            let params = EcsdParams::centered(2.0, SpdMatrix::scalar(sigma).unwrap()).unwrap();
            let target = Spectral(&params);
            let sched = StepSchedule::constant(0.1).unwrap();
            let t = run_mala(&target, &sched, &[0.0], 5000, 200_000, &mut RngStream::new(17, 0)).unwrap();
            let (m, se) = second_moment_with_se(&t);
            assert!((m - expect).abs() < 3.0 * se, "sigma={sigma}: second moment {m}, se {se}");
            assert!(t.step_weights().iter().all(|g| *g == 0.1));
        }
    }

    #[test]
    fn sequence_schedule_weights_follow_gamma_k() {
        let target = FnDensity::new(1, |x: &[f64]| -0.5 * x[0] * x[0], |x: &[f64]| vec![-x[0]]);
        let gammas: Vec<f64> = (1..=30).map(|k| 1.0 / k as f64).collect();
        let sched = StepSchedule::sequence(gammas.clone()).unwrap();
        let t = run_mala(&target, &sched, &[0.0], 10, 20, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(t.step_weights(), &gammas[10..]);
        let short = StepSchedule::sequence(vec![0.1; 5]).unwrap();
        assert!(run_mala(&target, &short, &[0.0], 10, 20, &mut RngStream::new(1, 0)).is_err());
        assert!(StepSchedule::constant(0.0).is_err());
    }

    #[test]
    fn gradient_failure_aborts() {
        let target = FnDensity::new(1, |x: &[f64]| -0.5 * x[0] * x[0], |x: &[f64]| {
            vec![if x[0].abs() > 0.5 { f64::INFINITY } else { -x[0] }]
        });
        let sched = StepSchedule::constant(0.5).unwrap();
        let r = run_mala(&target, &sched, &[0.0], 0, 1000, &mut RngStream::new(4, 0));
        assert!(matches!(r, Err(SamplerError::GradientFailure { .. })));
    }

    #[test]
    fn deterministic_given_seed() {
        let target = FnDensity::new(1, |x: &[f64]| -0.5 * x[0] * x[0], |x: &[f64]| vec![-x[0]]);
        let sched = StepSchedule::constant(0.3).unwrap();
        let a = run_mala(&target, &sched, &[0.0], 3, 100, &mut RngStream::new(8, 2)).unwrap();
        let b = run_mala(&target, &sched, &[0.0], 3, 100, &mut RngStream::new(8, 2)).unwrap();
        assert_eq!(a, b);
    }
}
