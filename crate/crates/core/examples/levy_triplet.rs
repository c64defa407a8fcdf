//! A Levy-Khintchine target with a user supplied Levy density.

use std::sync::Arc;

use fourier_mcmc::estimators::normalizing_constant_quadrature;
use fourier_mcmc::numerics::{QuadratureGrid, QuadratureRule, RngStream};
use fourier_mcmc::samplers::{run_mh, Proposal};
use fourier_mcmc::targets::{CharacteristicTarget, LevyTriplet, Spectral};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // variance-gamma style jumps
    let nu = Arc::new(|x: &[f64]| (-2.0 * x[0].abs()).exp() / x[0].abs());
    let t = LevyTriplet::new(vec![0.3], vec![0.05], nu, None)?;
    for u in [0.0, 1.0, 5.0, 20.0] {
        let cf = t.cf(&[u]);
        println!("cf({u:>4}) = {:.6}{:+.6}i", cf.re, cf.im);
    }
    let grid = QuadratureGrid::cube(1, -60.0, 60.0, 4001, QuadratureRule::Trapezoid)?;
    let cp = normalizing_constant_quadrature(&t, &grid)?;
    println!("C_p = {:.6}", cp.value);

    let trace = run_mh(&Spectral(&t), &Proposal::random_walk(1, 3.0)?, &[1.0], 1_000, 20_000, &mut RngStream::new(9, 0))?;
    let m2 = trace.effective_states().map(|u| u[0] * u[0]).sum::<f64>() / trace.effective() as f64;
    println!("chain on |cf|: acceptance {:.3}, E[u^2] {m2:.3}", trace.acceptance_rate()?);
    Ok(())
}
