use std::f64::consts::PI;

use rayon::prelude::*;

use super::{check_radii, fmt_list_note, DiagnosticsError, Domain, ErgodicityReport, Verdict, MOMENT_TOLERANCE};
use crate::estimators::IidSample;
use crate::numerics::{gauss_legendre_rule, norm};

/// What the exponential-moment probe integrates against.
pub struct MomentSource<'a> {
    pub dim: usize,
    /// Log-density, up to an additive constant; preferred when given (d ≤ 3).
    pub log_density: Option<&'a (dyn Fn(&[f64]) -> f64 + Sync)>,
    pub sample: Option<&'a IidSample>,
}

impl<'a> MomentSource<'a> {
    pub fn density(dim: usize, log_density: &'a (dyn Fn(&[f64]) -> f64 + Sync)) -> Self {
        MomentSource {
            dim,
            log_density: Some(log_density),
            sample: None,
        }
    }

    pub fn sample(sample: &'a IidSample) -> Self {
        MomentSource {
            dim: sample.dim(),
            log_density: None,
            sample: Some(sample),
        }
    }
}

const RADIAL_NODES: usize = 200;

/// `∫_{|x|<R} e^{s|x|} ρ(x) dx` for each `R` in `radii`, in polar coordinates
/// (Gauss–Legendre per radial shell, trapezoid in the periodic angle).
pub fn polar_ball_integrals(
    log_density: &(dyn Fn(&[f64]) -> f64 + Sync),
    dim: usize,
    s: f64,
    radii: &[f64],
) -> Result<Vec<f64>, DiagnosticsError> {
    check_radii(radii)?;
    let shells: Vec<(f64, f64)> = std::iter::once(0.0)
        .chain(radii.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| (w[0], w[1]))
        .collect();
    let angular: Vec<(Vec<f64>, f64)> = match dim {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let m = 256;
            (0..m)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / m as f64;
                    (vec![t.cos(), t.sin()], 2.0 * PI / m as f64)
                })
                .collect()
        }
        3 => {
            let (th, tw) = gauss_legendre_rule(0.0, PI, 64);
            let m = 128;
            let mut dirs = Vec::with_capacity(64 * m);
            for (t, w) in th.iter().zip(&tw) {
                for k in 0..m {
                    let ph = 2.0 * PI * k as f64 / m as f64;
                    dirs.push((
                        vec![t.sin() * ph.cos(), t.sin() * ph.sin(), t.cos()],
                        w * t.sin() * 2.0 * PI / m as f64,
                    ));
                }
            }
            dirs
        }
        _ => {
            return Err(DiagnosticsError::Invalid(format!(
                "polar quadrature supports d <= 3, got d={dim}; pass a sample instead"
            )))
        }
    };
    let increments: Vec<f64> = shells
        .par_iter()
        .map(|&(lo, hi)| {
            let (rs, ws) = gauss_legendre_rule(lo, hi, RADIAL_NODES);
            let mut acc = 0.0;
            let mut x = vec![0.0; dim];
            for (r, w) in rs.iter().zip(&ws) {
                let jac = r.powi(dim as i32 - 1);
                for (dir, aw) in &angular {
                    for k in 0..dim {
                        x[k] = r * dir[k];
                    }
                    let ld = log_density(&x);
                    if ld > f64::NEG_INFINITY {
                        acc += w * aw * jac * (s * r + ld).exp();
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = 0.0;
    Ok(increments
        .into_iter()
        .map(|inc| {
            total += inc;
            total
        })
        .collect())
}

fn sample_ball_integrals(sample: &IidSample, s: f64, radii: &[f64]) -> Vec<f64> {
    let n = sample.len() as f64;
    let mut acc = vec![0.0; radii.len()];
    for x in sample.points() {
        let r = norm(x);
        let v = (s * r).exp() / n;
        let first = radii.partition_point(|&rad| rad < r);
        if first < radii.len() {
            acc[first] += v;
        }
    }
    let mut total = 0.0;
    acc.into_iter()
        .map(|a| {
            total += a;
            total
        })
        .collect()
}

/// Partial integrals of `e^{s|x|}ρ` over nested balls for each `s`.
///
/// `s` stabilizes when the last shell adds less than 1e-3 of the total.
/// Consistent if some `s` stabilizes, inconsistent if none does.
pub fn exponential_moment_probe(
    source: &MomentSource,
    s_grid: &[f64],
    radii: &[f64],
    domain: Domain,
) -> Result<ErgodicityReport, DiagnosticsError> {
    check_radii(radii)?;
    if s_grid.is_empty() || s_grid.iter().any(|s| !(*s > 0.0)) {
        return Err(DiagnosticsError::Invalid("s grid must be non-empty and positive".into()));
    }
    if radii.len() < 2 {
        return Err(DiagnosticsError::Invalid("need at least two radii".into()));
    }
    let mut notes = vec![fmt_list_note("s_grid", s_grid)];
    let mut series = Vec::new();
    let mut stabilized = Vec::new();
    for &s in s_grid {
        let partial = match (source.log_density, source.sample) {
            (Some(f), _) => polar_ball_integrals(f, source.dim, s, radii)?,
            (None, Some(sample)) => sample_ball_integrals(sample, s, radii),
            (None, None) => return Err(DiagnosticsError::NoSource),
        };
        let k = partial.len();
        let (last, prev) = (partial[k - 1], partial[k - 2]);
        let ok = last.is_finite() && last > 0.0 && (last - prev) / last < MOMENT_TOLERANCE;
        if !last.is_finite() {
            notes.push(format!("s={s}: partial integral overflowed"));
        }
        stabilized.push(ok);
        series.push((format!("s_{s}"), partial));
    }
    let source_note = if source.log_density.is_some() { "density" } else { "sample" };
    notes.push(format!("source={source_note}"));
    let verdict = if stabilized.iter().any(|b| *b) {
        Verdict::Consistent
    } else {
        notes.push("partial integrals keep growing for every s".into());
        Verdict::Inconsistent
    };
    Ok(ErgodicityReport {
        probe: "exponential-moment".into(),
        domain,
        radii: radii.to_vec(),
        series,
        verdict,
        notes,
    })
}
