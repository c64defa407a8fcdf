use std::sync::Arc;

use fourier_mcmc::estimators::{
    fourier_iid_estimate, mepd_normalizing_constant, original_domain_mc_estimate, sample_ecsd, sample_mepd,
};
use fourier_mcmc::numerics::{random_rotation, Complex64, RngStream, SpdMatrix};
use fourier_mcmc::samplers::{run_mala, run_mh, Proposal, StepSchedule};
use fourier_mcmc::targets::{
    sech_payoff, sech_payoff_ft, CgmyParams, CharacteristicTarget, EcsdParams, LevyTriplet, Spectral,
};
use proptest::prelude::*;
use rand::Rng;

fn spd(d: usize, seed: u64, lo: f64, hi: f64) -> SpdMatrix {
    let mut rng = RngStream::new(seed, 0);
    let rot = random_rotation(d, &mut rng);
    let diag: Vec<f64> = (0..d).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    SpdMatrix::rotated_diagonal(&rot, &diag).unwrap()
}

fn point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..20.0, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spd_cholesky_reproduces_entries(d in 1usize..6, seed in 0u64..1000) {
        let s = spd(d, seed, 0.1, 5.0);
        let l = s.cholesky_factor();
        for i in 0..d {
            prop_assert!(l[i * d + i] > 0.0);
            for j in 0..d {
                let v: f64 = (0..d).map(|k| l[i * d + k] * l[j * d + k]).sum();
                prop_assert!((v - s.get(i, j)).abs() <= 1e-10 * s.get(i, j).abs().max(s.max_eigenvalue()));
            }
        }
    }

    #[test]
    fn rng_streams_replay(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream);
        for _ in 0..16 {
            prop_assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }

    #[test]
    fn ecsd_cf_invariants(alpha in 0.3f64..=2.0, d in 1usize..4, seed in 0u64..1000, u in point(3)) {
        let mu: Vec<f64> = (0..d).map(|i| 0.3 * i as f64 - 0.2).collect();
        let p = EcsdParams::new(alpha, spd(d, seed, 0.2, 3.0), mu).unwrap();
        let u = &u[..d];
        prop_assert!((p.cf(&vec![0.0; d]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let cf = p.cf(u);
        prop_assert!(cf.norm() <= 1.0 + 1e-15);
        let recon = p.phase(u) * p.log_abs_cf(u).exp();
        prop_assert!((recon - cf).norm() <= 1e-12);
        prop_assert!((p.phase(u).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn levy_cf_invariants(s in 0.0f64..1.0, drift in -1.0f64..1.0, u in -15.0f64..15.0) {
        let nu = Arc::new(|x: &[f64]| (-3.0 * x[0].abs()).exp() / x[0].abs().powf(1.5));
        let t = LevyTriplet::new(vec![s], vec![drift], nu, None).unwrap();
        prop_assert!((t.cf(&[0.0]) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let cf = t.cf(&[u]);
        prop_assert!(cf.norm() <= 1.0 + 1e-12);
        prop_assert!((t.phase(&[u]) * t.log_abs_cf(&[u]).exp() - cf).norm() <= 1e-12);
        // symmetric ν: the jump part is real, so |cf| is even
        prop_assert!((t.log_abs_cf(&[u]) - t.log_abs_cf(&[-u])).abs() < 1e-9);
    }

    #[test]
    fn cgmy_damping_strip_enforced(r in -8.0f64..2.0) {
        let ok = CgmyParams::new(1.0, 5.0, 5.0, 0.5, 0.1, 1.0, 100.0, vec![r]).is_ok();
        prop_assert_eq!(ok, r > -5.0 && r < 0.0);
    }

    #[test]
    fn random_walk_is_symmetric(d in 1usize..5, scale in 0.01f64..10.0, x in point(4), y in point(4)) {
        let q = Proposal::random_walk(d, scale).unwrap();
        let (x, y) = (&x[..d], &y[..d]);
        let (a, b) = (q.log_density(x, y), q.log_density(y, x));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        prop_assert!(a.is_finite());
    }

    #[test]
    fn independence_ignores_current_state(x in point(2), x2 in point(2), y in point(2)) {
        let q = Proposal::independence(vec![0.5, -1.0], SpdMatrix::new(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap()).unwrap();
        prop_assert_eq!(q.log_density(&x, &y), q.log_density(&x2, &y));
        prop_assert!(q.log_density(&x, &y).is_finite());
        let g = Proposal::generalized_gaussian(2, 0.7, 1.3).unwrap();
        prop_assert_eq!(g.log_density(&x, &y), g.log_density(&x2, &y));
        prop_assert!(g.log_density(&x, &y).is_finite());
    }

    #[test]
    fn mh_trace_invariants(seed in any::<u64>(), scale in 0.1f64..20.0, burn in 0usize..30, n in 1usize..200) {
        let p = EcsdParams::centered(1.3, SpdMatrix::identity(2)).unwrap();
        let t = run_mh(&Spectral(&p), &Proposal::random_walk(2, scale).unwrap(), &[0.6, 0.8], burn, n, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert_eq!(t.len(), burn + n + 1);
        prop_assert_eq!(t.accepted().len(), burn + n);
        prop_assert_eq!(t.step_weights().len(), n);
        let rate = t.acceptance_rate().unwrap();
        prop_assert!((0.0..=1.0).contains(&rate));
        for k in 0..burn + n {
            if !t.accepted()[k] {
                prop_assert_eq!(t.state(k + 1), t.state(k));
            }
        }
    }

    #[test]
    fn mala_trace_invariants(seed in any::<u64>(), gamma in 0.001f64..2.0, n in 1usize..200) {
        let p = EcsdParams::centered(2.0, SpdMatrix::identity(2)).unwrap();
        let t = run_mala(&Spectral(&p), &StepSchedule::constant(gamma).unwrap(), &[0.6, 0.8], 10, n, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert_eq!(t.len(), n + 11);
        prop_assert!(t.step_weights().iter().all(|&w| w == gamma));
        for k in 0..n + 10 {
            if !t.accepted()[k] {
                prop_assert_eq!(t.state(k + 1), t.state(k));
            }
        }
    }

    #[test]
    fn step_schedule_rejects_nonpositive(g in -1.0f64..=0.0) {
        prop_assert!(StepSchedule::constant(g).is_err());
        prop_assert!(StepSchedule::sequence(vec![0.1, g]).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn estimate_reports_are_well_formed(alpha in 0.8f64..=2.0, seed in any::<u64>(), n in 1usize..500) {
        let sigma = SpdMatrix::identity(2);
        let p = EcsdParams::centered(alpha, sigma.clone()).unwrap();
        let cp = mepd_normalizing_constant(alpha, &sigma).unwrap();
        let u = sample_mepd(alpha, &sigma, n, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert!(u.points().all(|x| x.iter().all(|v| v.is_finite())));
        let fg = |u: &[f64]| Complex64::new(sech_payoff_ft(u), 0.0);
        let f = fourier_iid_estimate(&u, &fg, &p, &cp).unwrap();
        prop_assert!(f.n_effective >= 1 && f.std_error >= 0.0);
        prop_assert!(f.value.is_finite() && f.imag_residual.is_finite());
        let x = sample_ecsd(&p, n, &mut RngStream::new(seed, 1)).unwrap();
        let o = original_domain_mc_estimate(&x, &sech_payoff).unwrap();
        prop_assert!(o.n_effective == n && o.std_error >= 0.0 && o.imag_residual == 0.0);
    }
}
