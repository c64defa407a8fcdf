use rand::Rng;

use super::{MarkovChainTrace, Proposal, SamplerError, WeightScheme};
use crate::numerics::RngStream;
use crate::targets::LogDensity;

/// `min{1, p(y) q(y,x) / (p(x) q(x,y))}` from log-values.
pub fn acceptance_probability(log_p_x: f64, log_p_y: f64, log_q_xy: f64, log_q_yx: f64) -> f64 {
    if log_p_y == f64::NEG_INFINITY || log_p_y.is_nan() {
        return 0.0;
    }
    let log_ratio = (log_p_y - log_p_x) + (log_q_yx - log_q_xy);
    if log_ratio.is_nan() {
        return 0.0;
    }
    if log_ratio >= 0.0 {
        1.0
    } else {
        log_ratio.exp().clamp(0.0, 1.0)
    }
}

/// Metropolis–Hastings acceptance probability of the move `x → y`.
pub fn mh_acceptance(log_p: &dyn LogDensity, prop: &Proposal, x: &[f64], y: &[f64]) -> f64 {
    let lx = log_p.log_density(x);
    let ly = log_p.log_density(y);
    if prop.is_symmetric() {
        acceptance_probability(lx, ly, 0.0, 0.0)
    } else {
        acceptance_probability(lx, ly, prop.log_density(x, y), prop.log_density(y, x))
    }
}

/// Runs `N + n` Metropolis–Hastings transitions from `x0`.
pub fn run_mh(
    log_p: &dyn LogDensity,
    prop: &Proposal,
    x0: &[f64],
    burn_in: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<MarkovChainTrace, SamplerError> {
    let d = log_p.dim();
    for got in [x0.len(), prop.dim()] {
        if got != d {
            return Err(SamplerError::Dimension { expected: d, got });
        }
    }
    let mut lp_x = log_p.log_density(x0);
    if !lp_x.is_finite() {
        return Err(SamplerError::NonFiniteStart(x0.to_vec()));
    }
    let symmetric = prop.is_symmetric();
    let mut x = x0.to_vec();
    let mut trace = MarkovChainTrace::with_capacity(d, x0, burn_in, n, WeightScheme::Uniform);
    let mut non_finite = 0usize;
    for _ in 0..burn_in + n {
        let u: f64 = rng.random();
        let y = prop.draw(&x, rng);
        let mut accept = false;
        if y.iter().all(|v| v.is_finite()) {
            let lp_y = log_p.log_density(&y);
            let a = if symmetric {
                acceptance_probability(lp_x, lp_y, 0.0, 0.0)
            } else {
                acceptance_probability(lp_x, lp_y, prop.log_density(&x, &y), prop.log_density(&y, &x))
            };
            if u < a {
                accept = true;
                x = y;
                lp_x = lp_y;
            }
        } else {
            non_finite += 1;
        }
        trace.push(&x, accept, 1.0);
    }
    if non_finite > 0 {
        trace.warn(format!("{non_finite} non-finite proposal draws rejected"));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SpdMatrix;
    use crate::targets::{EcsdParams, FnDensity, Spectral};

    fn std_normal() -> FnDensity<impl Fn(&[f64]) -> f64 + Send + Sync, impl Fn(&[f64]) -> Vec<f64> + Send + Sync> {
        FnDensity::new(1, |x: &[f64]| -0.5 * x[0] * x[0], |x: &[f64]| vec![-x[0]])
    }

    #[test]
    fn acceptance_examples() {
        assert_eq!(acceptance_probability(-1.0, -1.0, 0.0, 0.0), 1.0);
        assert!((acceptance_probability(0.0, -(2.0f64).ln(), 0.0, 0.0) - 0.5).abs() < 1e-15);
        // q(y) = 2 q(x), independence: ratio q(x)/q(y)
        let lq_x = -1.0;
        let lq_y = lq_x + (2.0f64).ln();
        assert!((acceptance_probability(0.0, 0.0, lq_y, lq_x) - 0.5).abs() < 1e-15);
        assert_eq!(acceptance_probability(0.0, f64::NEG_INFINITY, 0.0, 0.0), 0.0);
    }

    #[test]
    fn detailed_balance_pointwise() {
        let target = std_normal();
        let prop = Proposal::independence(vec![0.5], SpdMatrix::scalar(3.0).unwrap()).unwrap();
        let mut rng = RngStream::new(11, 0);
        for _ in 0..100 {
            let x = prop.draw(&[0.0], &mut rng);
            let y = prop.draw(&[0.0], &mut rng);
            let lhs = target.log_density(&x) + prop.log_density(&x, &y);
            let rhs = target.log_density(&y) + prop.log_density(&y, &x);
            let fwd = lhs.exp() * mh_acceptance(&target, &prop, &x, &y);
            let bwd = rhs.exp() * mh_acceptance(&target, &prop, &y, &x);
            assert!((fwd - bwd).abs() <= 1e-12 * fwd.abs().max(bwd.abs()), "{fwd} vs {bwd}");
        }
    }

    #[test]
    fn discretized_chain_fixed_point() {
        let m = 31;
        let pts: Vec<f64> = (0..m).map(|i| -3.0 + 6.0 * i as f64 / (m - 1) as f64).collect();
        let logp: Vec<f64> = pts.iter().map(|x| -x.abs().powf(1.5) + 0.3 * x).collect();
        let z: f64 = logp.iter().map(|l| l.exp()).sum();
        let p: Vec<f64> = logp.iter().map(|l| l.exp() / z).collect();
        // asymmetric row-normalized proposal
        let mut q = vec![0.0; m * m];
        for i in 0..m {
            let row: Vec<f64> = (0..m)
                .map(|j| (-(pts[j] - 0.5 * pts[i]).powi(2) / 2.0).exp())
                .collect();
            let s: f64 = row.iter().sum();
            for j in 0..m {
                q[i * m + j] = row[j] / s;
            }
        }
        let mut k = vec![0.0; m * m];
        for i in 0..m {
            let mut stay = 1.0;
            for j in 0..m {
                if i == j {
                    continue;
                }
                let a = acceptance_probability(logp[i], logp[j], q[i * m + j].ln(), q[j * m + i].ln());
                k[i * m + j] = q[i * m + j] * a;
                stay -= k[i * m + j];
            }
            k[i * m + i] = stay;
        }
        for j in 0..m {
            let pk: f64 = (0..m).map(|i| p[i] * k[i * m + j]).sum();
            assert!((pk - p[j]).abs() < 1e-10, "column {j}: {pk} vs {}", p[j]);
        }
    }

    #[test]
    fn rejected_steps_copy_bitwise() {
        let target = std_normal();
        let prop = Proposal::random_walk(1, 5.0).unwrap();
        let t = run_mh(&target, &prop, &[0.3], 10, 500, &mut RngStream::new(2, 0)).unwrap();
        assert_eq!(t.len(), 511);
        for (k, acc) in t.accepted().iter().enumerate() {
            if !acc {
                assert_eq!(t.state(k + 1)[0].to_bits(), t.state(k)[0].to_bits());
            }
        }
        assert!(t.step_weights().iter().all(|w| *w == 1.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let target = std_normal();
        let prop = Proposal::random_walk(1, 1.0).unwrap();
        let a = run_mh(&target, &prop, &[0.0], 5, 200, &mut RngStream::new(9, 4)).unwrap();
        let b = run_mh(&target, &prop, &[0.0], 5, 200, &mut RngStream::new(9, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn burn_in_only_trace_has_empty_window() {
        let target = std_normal();
        let prop = Proposal::random_walk(1, 1.0).unwrap();
        let t = run_mh(&target, &prop, &[0.0], 20, 0, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(t.effective(), 0);
        assert!(t.acceptance_rate().is_err());
    }

    #[test]
    fn non_finite_start_is_refused() {
        let target = FnDensity::new(1, |_: &[f64]| f64::NEG_INFINITY, |_: &[f64]| vec![0.0]);
        let prop = Proposal::random_walk(1, 1.0).unwrap();
        assert!(matches!(
            run_mh(&target, &prop, &[0.0], 1, 1, &mut RngStream::new(1, 0)),
            Err(SamplerError::NonFiniteStart(_))
        ));
    }

    #[test]
    fn spectral_ecsd_chain_is_centered() {
        let params = EcsdParams::centered(1.5, SpdMatrix::identity(2)).unwrap();
        let target = Spectral(&params);
        let prop = Proposal::random_walk(2, 1.0).unwrap();
        let t = run_mh(&target, &prop, &[0.0, 0.0], 5000, 100_000, &mut RngStream::new(7, 0)).unwrap();
        // batch means standard error per coordinate
        let b = 50;
        let len = t.effective() / b;
        for c in 0..2 {
            let xs: Vec<f64> = t.effective_states().map(|x| x[c]).collect();
            let means: Vec<f64> = xs.chunks(len).map(|w| w.iter().sum::<f64>() / w.len() as f64).collect();
            let m = means.iter().sum::<f64>() / b as f64;
            let v = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64;
            let se = (v / b as f64).sqrt();
            assert!(m.abs() < 3.0 * se + 1e-12, "coordinate {c}: mean {m}, se {se}");
        }
    }
}
