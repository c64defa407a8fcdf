//! Random-walk Metropolis on a 2-d Cauchy, once on the density and once on
//! the modulus of its characteristic function.

use fourier_mcmc::estimators::{
    mepd_normalizing_constant, original_domain_trace_estimate, parseval_weighted_estimate,
};
use fourier_mcmc::numerics::{Complex64, RngStream, SpdMatrix};
use fourier_mcmc::samplers::{run_mh, Proposal};
use fourier_mcmc::targets::{sech_payoff, sech_payoff_ft, EcsdParams, EllipticalDensity, Spectral};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = SpdMatrix::diagonal(&[0.2, 0.4])?;
    let p = EcsdParams::centered(1.0, sigma.clone())?;
    let density = EllipticalDensity::cauchy(p.clone())?;
    let x0 = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let (burn, n) = (5_000, 100_000);

    let prop = Proposal::random_walk(2, 1.0)?;
    let t = run_mh(&density, &prop, &x0, burn, n, &mut RngStream::new(3, 0))?;
    let orig = original_domain_trace_estimate(&t, &sech_payoff)?;
    println!("original: {:.5} ± {:.5}  acceptance {:.3}", orig.value, orig.std_error, t.acceptance_rate()?);

    let prop = Proposal::random_walk(2, 2.0)?;
    let t = run_mh(&Spectral(&p), &prop, &x0, burn, n, &mut RngStream::new(3, 1))?;
    let cp = mepd_normalizing_constant(1.0, &sigma)?;
    let fg = |u: &[f64]| Complex64::new(sech_payoff_ft(u), 0.0);
    let four = parseval_weighted_estimate(&t, &fg, &p, &cp)?;
    println!("fourier:  {:.5} ± {:.5}  acceptance {:.3}", four.value, four.std_error, t.acceptance_rate()?);
    Ok(())
}
