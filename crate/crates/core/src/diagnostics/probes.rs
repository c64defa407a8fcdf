use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{check_radii, fmt_list_note, DiagnosticsError, Domain, ErgodicityReport, Verdict, DRIFT_THRESHOLD, GRADIENT_THRESHOLD};
use crate::numerics::{dot, norm, symmetric_eigenvalues, RngStream};
use crate::samplers::Proposal;
use crate::targets::{LogDensity, TargetError};

type Gradient<'a> = &'a (dyn Fn(&[f64]) -> Result<Vec<f64>, TargetError> + Sync);

fn top_half(xs: &[f64]) -> &[f64] {
    &xs[xs.len() / 2..]
}

fn gradients_along(grad: Gradient, e: &[f64], radii: &[f64]) -> Result<Vec<Vec<f64>>, String> {
    radii
        .par_iter()
        .map(|r| {
            let x: Vec<f64> = e.iter().map(|v| r * v).collect();
            match grad(&x) {
                Ok(g) if g.iter().all(|v| v.is_finite()) => Ok(g),
                Ok(g) => Err(format!("non-finite gradient {g:?} at r={r}")),
                Err(err) => Err(format!("gradient failed at r={r}: {err}")),
            }
        })
        .collect()
}

fn check_unit(e: &[f64]) -> Result<(), DiagnosticsError> {
    let n = norm(e);
    if (n - 1.0).abs() > 1e-12 {
        return Err(DiagnosticsError::NotUnit(n));
    }
    Ok(())
}

/// `⟨e, ∇log ρ(r e)⟩` along `radii`.
///
/// Consistent when the last value is below −10 and the values decrease over
/// the top half of the radii; inconsistent when they decay monotonically in
/// magnitude to below 1e-3 (the drift vanishes); inconclusive otherwise.
pub fn radial_drift_profile(
    grad: Gradient,
    e: &[f64],
    radii: &[f64],
    domain: Domain,
) -> Result<ErgodicityReport, DiagnosticsError> {
    check_unit(e)?;
    check_radii(radii)?;
    let mut report = ErgodicityReport {
        probe: "radial-drift".into(),
        domain,
        radii: radii.to_vec(),
        series: Vec::new(),
        verdict: Verdict::Inconclusive,
        notes: vec![fmt_list_note("direction", e)],
    };
    let grads = match gradients_along(grad, e, radii) {
        Ok(g) => g,
        Err(note) => {
            report.series.push(("drift".into(), Vec::new()));
            report.notes.push(note);
            return Ok(report);
        }
    };
    let values: Vec<f64> = grads.iter().map(|g| dot(e, g)).collect();
    let top = top_half(&values);
    let last = *values.last().unwrap();
    let decreasing = top.windows(2).all(|w| w[1] < w[0]);
    let vanishing = top.windows(2).all(|w| w[1].abs() <= w[0].abs()) && last.abs() < GRADIENT_THRESHOLD;
    report.verdict = if last < DRIFT_THRESHOLD && decreasing {
        Verdict::Consistent
    } else if vanishing {
        report.notes.push("radial drift vanishes at large radii".into());
        Verdict::Inconsistent
    } else {
        Verdict::Inconclusive
    };
    report.series.push(("drift".into(), values));
    Ok(report)
}

/// `|∇log ρ(r e)|` along each direction; inconsistent with geometric
/// ergodicity of MALA when the norms decay to below 1e-3 in every direction.
pub fn mala_gradient_limit_probe(
    grad: Gradient,
    directions: &[Vec<f64>],
    radii: &[f64],
    domain: Domain,
) -> Result<ErgodicityReport, DiagnosticsError> {
    check_radii(radii)?;
    if directions.is_empty() {
        return Err(DiagnosticsError::Invalid("no probe directions".into()));
    }
    let mut report = ErgodicityReport {
        probe: "mala-gradient-limit".into(),
        domain,
        radii: radii.to_vec(),
        series: Vec::new(),
        verdict: Verdict::Inconclusive,
        notes: Vec::new(),
    };
    let mut all_vanish = true;
    for (k, e) in directions.iter().enumerate() {
        check_unit(e)?;
        let grads = match gradients_along(grad, e, radii) {
            Ok(g) => g,
            Err(note) => {
                report.notes.push(note);
                return Ok(report);
            }
        };
        let norms: Vec<f64> = grads.iter().map(|g| norm(g)).collect();
        let top = top_half(&norms);
        let vanish = top.windows(2).all(|w| w[1] <= w[0]) && *norms.last().unwrap() < GRADIENT_THRESHOLD;
        all_vanish &= vanish;
        report.notes.push(fmt_list_note(&format!("e{k}"), e));
        report.series.push((format!("e{k}"), norms));
    }
    if all_vanish {
        report.notes.push("gradient vanishes at large radii in every direction".into());
        report.verdict = Verdict::Inconsistent;
    } else {
        report.verdict = Verdict::Consistent;
    }
    Ok(report)
}

/// Finite-difference evidence for the sufficient MALA conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct MalaSufficientReport {
    /// Largest `|∇log ρ(x) − ∇log ρ(y)| / |x − y|` over pairs in the box.
    pub lipschitz: f64,
    /// Smallest eigenvalue of `−∇²log ρ` over points with `|x| = radius`.
    pub min_hessian_eigenvalue: f64,
    /// Largest `|∂³_v log ρ|` over the box and unit directions `v`.
    pub max_third_derivative: f64,
    pub box_half_width: f64,
    pub radius: f64,
    pub report: ErgodicityReport,
}

/// Hessian of `log ρ` by central differences of the gradient, step
/// `1e-4·(1 + |x|)`, symmetrized.
fn fd_hessian(target: &dyn LogDensity, x: &[f64]) -> Result<Vec<f64>, TargetError> {
    let d = x.len();
    let h = 1e-4 * (1.0 + norm(x));
    let mut hess = vec![0.0; d * d];
    let mut xp = x.to_vec();
    for j in 0..d {
        xp[j] = x[j] + h;
        let gp = target.grad_log_density(&xp)?;
        xp[j] = x[j] - h;
        let gm = target.grad_log_density(&xp)?;
        xp[j] = x[j];
        for i in 0..d {
            hess[i * d + j] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    for i in 0..d {
        for j in 0..i {
            let s = 0.5 * (hess[i * d + j] + hess[j * d + i]);
            hess[i * d + j] = s;
            hess[j * d + i] = s;
        }
    }
    Ok(hess)
}

/// `∂³_v log ρ(x)` as a second difference of `⟨v, ∇log ρ⟩`, step `1e-3·(1 + |x|)`.
fn fd_third(target: &dyn LogDensity, x: &[f64], v: &[f64]) -> Result<f64, TargetError> {
    let h = 1e-3 * (1.0 + norm(x));
    let shifted = |t: f64| -> Result<f64, TargetError> {
        let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + t * b).collect();
        Ok(dot(v, &target.grad_log_density(&y)?))
    };
    Ok((shifted(h)? - 2.0 * shifted(0.0)? + shifted(-h)?) / (h * h))
}

fn unit_direction(d: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&z);
        if n > 1e-12 {
            return z.into_iter().map(|v| v / n).collect();
        }
    }
}

/// Probes the Lipschitz, strong-convexity and third-derivative conditions on
/// `probes` random points of `[−K, K]^d` (and of the sphere `|x| = radius`).
pub fn mala_sufficient_probe(
    target: &dyn LogDensity,
    box_half_width: f64,
    radius: f64,
    probes: usize,
    domain: Domain,
    rng: &mut RngStream,
) -> Result<MalaSufficientReport, DiagnosticsError> {
    if !(box_half_width > 0.0) || !(radius > 0.0) || probes == 0 {
        return Err(DiagnosticsError::Invalid(format!(
            "need K > 0, radius > 0, probes > 0; got {box_half_width}, {radius}, {probes}"
        )));
    }
    let d = target.dim();
    let k = box_half_width;
    let uniform = |rng: &mut RngStream| -> Vec<f64> { (0..d).map(|_| k * (2.0 * rng.random::<f64>() - 1.0)).collect() };
    let mut lipschitz = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut third = 0.0f64;
    let mut notes = vec![format!("box=[-{k},{k}]^{d}"), format!("radius={radius}"), format!("probes={probes}")];
    let mut failed = None;
    for _ in 0..probes {
        let x = uniform(rng);
        let y = uniform(rng);
        let v = unit_direction(d, rng);
        let e = unit_direction(d, rng);
        let far: Vec<f64> = e.iter().map(|c| radius * c).collect();
        let step = || -> Result<(f64, f64, f64), TargetError> {
            let gx = target.grad_log_density(&x)?;
            let gy = target.grad_log_density(&y)?;
            let diff: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
            let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let lip = norm(&diff) / norm(&dx);
            let hess = fd_hessian(target, &far)?;
            let neg: Vec<f64> = hess.iter().map(|h| -h).collect();
            let eig = symmetric_eigenvalues(d, &neg)[0];
            Ok((lip, eig, fd_third(target, &x, &v)?.abs()))
        };
        match step() {
            Ok((l, e, t)) if l.is_finite() && e.is_finite() && t.is_finite() => {
                lipschitz = lipschitz.max(l);
                min_eig = min_eig.min(e);
                third = third.max(t);
            }
            Ok(_) => failed = Some("non-finite finite-difference value".to_string()),
            Err(err) => failed = Some(format!("gradient failure: {err}")),
        }
        if failed.is_some() {
            break;
        }
    }
    let strongly_convex = min_eig > 1e-6;
    let verdict = if let Some(f) = failed {
        notes.push(f);
        Verdict::Inconclusive
    } else if strongly_convex {
        Verdict::Consistent
    } else {
        notes.push("strong convexity not observed at the probe radius".into());
        Verdict::Inconclusive
    };
    let report = ErgodicityReport {
        probe: "mala-sufficient".into(),
        domain,
        radii: vec![radius],
        series: vec![
            ("lipschitz".into(), vec![lipschitz]),
            ("min-hessian-eigenvalue".into(), vec![min_eig]),
            ("max-third-derivative".into(), vec![third]),
        ],
        verdict,
        notes,
    };
    Ok(MalaSufficientReport {
        lipschitz,
        min_hessian_eigenvalue: min_eig,
        max_third_derivative: third,
        box_half_width,
        radius,
        report,
    })
}

/// Monte Carlo mass of the region of certain acceptance `{y : ρ(y) ≥ ρ(x)}`
/// under a random-walk proposal from each probe point.
pub fn acceptance_region_mass_probe(
    log_rho: &(dyn Fn(&[f64]) -> f64 + Sync),
    proposal: &Proposal,
    points: &[Vec<f64>],
    draws: usize,
    rng: &RngStream,
) -> Result<Vec<f64>, DiagnosticsError> {
    if !proposal.is_symmetric() {
        return Err(DiagnosticsError::Invalid("acceptance-region probe needs a random-walk proposal".into()));
    }
    if draws == 0 {
        return Err(DiagnosticsError::Invalid("need at least one draw".into()));
    }
    points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            if x.len() != proposal.dim() {
                return Err(DiagnosticsError::Dimension {
                    expected: proposal.dim(),
                    got: x.len(),
                });
            }
            let mut local = rng.fork(i as u64);
            let lx = log_rho(x);
            let hits = (0..draws)
                .filter(|_| {
                    let y = proposal.draw(x, &mut local);
                    log_rho(&y) >= lx
                })
                .count();
            Ok(hits as f64 / draws as f64)
        })
        .collect()
}
