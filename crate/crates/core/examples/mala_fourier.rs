//! MALA on a spectral target with constant and decreasing step sizes.

use fourier_mcmc::estimators::{mepd_normalizing_constant, parseval_weighted_estimate};
use fourier_mcmc::numerics::{Complex64, RngStream, SpdMatrix};
use fourier_mcmc::samplers::{run_mala, StepSchedule};
use fourier_mcmc::targets::{sech_payoff_ft, EcsdParams, Spectral};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = SpdMatrix::identity(3);
    let p = EcsdParams::centered(1.5, sigma.clone())?;
    let cp = mepd_normalizing_constant(1.5, &sigma)?;
    let fg = |u: &[f64]| Complex64::new(sech_payoff_ft(u), 0.0);
    let (burn, n) = (2_000, 40_000);
    let x0 = [1.0 / 3f64.sqrt(); 3];

    let sequence: Vec<f64> = (1..=burn + n).map(|k| 0.5 / (k as f64).powf(0.1)).collect();
    let schedules = [
        ("constant 0.1", StepSchedule::constant(0.1)?),
        ("constant 0.5", StepSchedule::constant(0.5)?),
        ("0.5 k^-0.1", StepSchedule::sequence(sequence)?),
    ];
    for (name, sched) in &schedules {
        let t = run_mala(&Spectral(&p), sched, &x0, burn, n, &mut RngStream::new(11, 0))?;
        let est = parseval_weighted_estimate(&t, &fg, &p, &cp)?;
        println!(
            "{name:>13}: {:.5} ± {:.5}  acceptance {:.3}",
            est.value,
            est.std_error,
            t.acceptance_rate()?
        );
    }
    Ok(())
}
