//! Drift, gradient and moment probes for a Cauchy target in both domains.

use fourier_mcmc::diagnostics::{
    default_drift_radii, exponential_moment_probe, mala_gradient_limit_probe, radial_drift_profile, Domain,
    MomentSource, DEFAULT_MOMENT_RADII, DEFAULT_S_GRID,
};
use fourier_mcmc::numerics::SpdMatrix;
use fourier_mcmc::targets::{CharacteristicTarget, EcsdParams, EllipticalDensity, LogDensity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = EcsdParams::centered(1.0, SpdMatrix::diagonal(&[1.0, 2.0])?)?;
    let density = EllipticalDensity::cauchy(p.clone())?;
    let e = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let radii = default_drift_radii();

    let spectral = |u: &[f64]| p.grad_log_abs_cf(u);
    let original = |x: &[f64]| density.grad_log_density(x);
    let mut reports = vec![
        radial_drift_profile(&spectral, &e, &radii, Domain::Fourier)?,
        radial_drift_profile(&original, &e, &radii, Domain::Original)?,
        mala_gradient_limit_probe(&original, &[vec![1.0, 0.0], vec![0.0, 1.0]], &radii, Domain::Original)?,
    ];
    let log_rho = |x: &[f64]| density.log_density(x);
    reports.push(exponential_moment_probe(
        &MomentSource::density(2, &log_rho),
        &DEFAULT_S_GRID,
        &DEFAULT_MOMENT_RADII,
        Domain::Original,
    )?);
    for r in &reports {
        println!("{:<22} {:<9} {}", r.probe, r.domain.as_str(), r.verdict.as_str());
    }
    println!();
    print!("{}", reports[0].render());
    Ok(())
}
