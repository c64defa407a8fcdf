//! One-sided stable variates and ECSD draws checked against closed forms.

use fourier_mcmc::estimators::{sample_ecsd, sample_mepd, sample_one_sided_stable};
use fourier_mcmc::numerics::{RngStream, SpdMatrix};
use fourier_mcmc::targets::{CharacteristicTarget, EcsdParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // alpha' = 1/2 is the Levy distribution, median 1/(2 erfc^-1(1/2)^2)
    let mut rng = RngStream::new(2, 0);
    let mut s: Vec<f64> = (0..100_001).map(|_| sample_one_sided_stable(0.5, &mut rng)).collect();
    s.sort_by(f64::total_cmp);
    println!("levy median {:.4} (exact 1.0991)", s[50_000]);

    let p = EcsdParams::new(1.5, SpdMatrix::scalar(0.5)?, vec![1.0])?;
    let x = sample_ecsd(&p, 200_000, &mut RngStream::new(2, 1))?;
    for u in [0.5, 1.0, 2.0] {
        let (c, si) = x.points().fold((0.0, 0.0), |(c, s), x| (c + (u * x[0]).cos(), s + (u * x[0]).sin()));
        let n = x.len() as f64;
        let exact = p.cf(&[u]);
        println!("cf({u}) empirical {:.4}{:+.4}i  exact {:.4}{:+.4}i", c / n, si / n, exact.re, exact.im);
    }

    let m = sample_mepd(1.0, &SpdMatrix::identity(3), 100_000, &mut RngStream::new(2, 2))?;
    let mean_r = m.points().map(|u| u.iter().map(|v| v * v).sum::<f64>().sqrt()).sum::<f64>() / m.len() as f64;
    println!("MEPD alpha=1 d=3 mean radius {mean_r:.4} (exact 3)");
    Ok(())
}
