//! C_p in closed form against graded quadrature, and a generic target.

use fourier_mcmc::estimators::{
    mepd_normalizing_constant_closed_form, mepd_normalizing_constant_quadrature, normalizing_constant_quadrature,
};
use fourier_mcmc::numerics::{QuadratureGrid, QuadratureRule, SpdMatrix};
use fourier_mcmc::targets::EcsdParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = SpdMatrix::new(2, vec![1.5, 0.4, 0.4, 0.7])?;
    println!("alpha   closed            quadrature        est. error");
    for alpha in [0.8, 1.0, 1.2, 1.5, 2.0] {
        let closed = mepd_normalizing_constant_closed_form(alpha, &sigma)?;
        let (quad, err) = mepd_normalizing_constant_quadrature(alpha, &sigma)?;
        println!("{alpha:<7} {closed:<17.12} {quad:<17.12} {err:.1e}");
    }

    let p = EcsdParams::centered(2.0, sigma.clone())?;
    let grid = QuadratureGrid::cube(2, -12.0, 12.0, 201, QuadratureRule::Trapezoid)?;
    let generic = normalizing_constant_quadrature(&p, &grid)?;
    println!("gaussian on a box grid: {:.12} (closed {:.12})", generic.value, mepd_normalizing_constant_closed_form(2.0, &sigma)?);
    Ok(())
}
