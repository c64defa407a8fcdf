//! Put on the maximum of CGMY assets: quadrature, importance sampling and
//! random-walk Metropolis on the damped characteristic function.

use fourier_mcmc::estimators::{
    cgmy_importance_sampling_estimate, cgmy_mcmc_estimate, cgmy_normalizing_constant, cgmy_quadrature_price_default,
};
use fourier_mcmc::numerics::RngStream;
use fourier_mcmc::samplers::{run_mh, Proposal};
use fourier_mcmc::targets::{CgmyParams, Spectral};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let strike = 100.0;
    for d in [1, 2] {
        let p = CgmyParams::reference(d);
        let (quad, err) = cgmy_quadrature_price_default(&p, strike)?;
        println!("d={d} quadrature {quad:.5} (grid error {err:.1e})");

        let is = cgmy_importance_sampling_estimate(&p, strike, 100_000, 1.0, 1.0, &mut RngStream::new(5, 0))?;
        println!("      IS laplace q {:.5} ± {:.5}", is.value, is.std_error);

        let cp = cgmy_normalizing_constant(&p)?;
        let prop = Proposal::random_walk(d, 4.0)?;
        let t = run_mh(&Spectral(&p), &prop, &vec![1.0 / (d as f64).sqrt(); d], 5_000, 100_000, &mut RngStream::new(5, 1))?;
        let mc = cgmy_mcmc_estimate(&p, strike, &t, &cp)?;
        println!("      MHRW         {:.5} ± {:.5}", mc.value, mc.std_error);
    }
    Ok(())
}
