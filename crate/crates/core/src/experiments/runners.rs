use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use super::gold::sech_gold;
use super::tuning::{grid_argmin, mse, TuningRow};
use super::{
    numerical, relative_error, replicate_stream, EstimateRow, ExperimentConfig, ExperimentError, ExperimentKind, Failure,
    GoldEstimate, LabelledReport, RunResult,
};
use crate::diagnostics::{
    acceptance_region_mass_probe, default_drift_radii, exponential_moment_probe, mala_gradient_limit_probe,
    mala_sufficient_probe, radial_drift_profile, Domain, ErgodicityReport, MomentSource, Verdict, DEFAULT_MOMENT_RADII,
    DEFAULT_S_GRID,
};
use crate::estimators::{
    cgmy_importance_sampling_estimate, cgmy_mcmc_estimate, cgmy_normalizing_constant, cgmy_quadrature_price_default,
    fourier_iid_estimate, mepd_normalizing_constant, original_domain_mc_estimate, original_domain_trace_estimate,
    parseval_weighted_estimate, sample_ecsd, sample_mepd, EstimateReport, NormalizingConstant,
};
use crate::numerics::rng::label;
use crate::numerics::{random_rotation, RngStream, SpdMatrix};
use crate::samplers::{run_mala, run_mh, MarkovChainTrace, Proposal, SamplerError, StepSchedule};
use crate::targets::{
    sech_payoff, sech_payoff_ft, CgmyParams, CharacteristicTarget, EcsdParams, EllipticalDensity, LogDensity, Spectral,
};

/// Dispatches on `cfg.kind`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, ExperimentError> {
    match cfg.kind {
        ExperimentKind::McComparison => run_mc_comparison(cfg),
        ExperimentKind::McmcCauchy => run_mcmc_cauchy(cfg),
        ExperimentKind::CgmyPricing => run_cgmy_pricing(cfg),
        ExperimentKind::Diagnostics => run_diagnostics(cfg),
    }
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<(), ExperimentError> {
    cfg.validate()?;
    if cfg.kind != kind {
        return Err(ExperimentError::Config(format!(
            "config is for `{}`, not `{}`",
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    Ok(())
}

/// `Σ = UᵀDU` with `D = diag(step, …, d·step)` and `U` drawn once per `(seed, d)`.
fn scatter_matrix(cfg: &ExperimentConfig, d: usize) -> Result<SpdMatrix, ExperimentError> {
    let diag = cfg.diagonal(d);
    if !cfg.random_rotation {
        return SpdMatrix::diagonal(&diag).map_err(numerical);
    }
    let mut rng = RngStream::from_path(cfg.seed, &[label("rotation"), d as u64]);
    let u = random_rotation(d, &mut rng);
    SpdMatrix::rotated_diagonal(&u, &diag).map_err(numerical)
}

fn alpha_panel(alpha: f64) -> String {
    format!("alpha={alpha}")
}

fn sech_transform(u: &[f64]) -> Complex64 {
    Complex64::new(sech_payoff_ft(u), 0.0)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

struct Panel<'a> {
    kind: ExperimentKind,
    d: usize,
    params: &'a str,
    gold: f64,
}

impl Panel<'_> {
    fn row(&self, method: &str, domain: Domain, replicate: usize, report: &EstimateReport) -> Result<EstimateRow, ExperimentError> {
        Ok(EstimateRow {
            experiment: self.kind,
            d: self.d,
            params: self.params.to_string(),
            method: method.to_string(),
            domain,
            replicate,
            estimate: report.value,
            rel_error: relative_error(report.value, self.gold)?,
            std_error: report.std_error,
            gold: self.gold,
        })
    }

    fn failure(&self, method: &str, domain: Domain, phase: &str, replicate: usize, message: String) -> Failure {
        Failure {
            d: self.d,
            params: self.params.to_string(),
            method: method.to_string(),
            domain,
            phase: phase.to_string(),
            replicate,
            message,
        }
    }
}

/// Original- versus Fourier-domain i.i.d. Monte Carlo for ECSD targets over
/// the `alpha` grid.
pub fn run_mc_comparison(cfg: &ExperimentConfig) -> Result<RunResult, ExperimentError> {
    expect_kind(cfg, ExperimentKind::McComparison)?;
    let kind = cfg.kind;
    let mut result = RunResult::new(kind, cfg.seed);
    for &d in &cfg.dims {
        let sigma = scatter_matrix(cfg, d)?;
        for &alpha in &cfg.alphas {
            let params = EcsdParams::centered(alpha, sigma.clone()).map_err(|e| ExperimentError::Config(e.to_string()))?;
            let name = alpha_panel(alpha);
            let gold = sech_gold(&params, cfg.gold_samples, cfg.replicates, cfg.seed, kind, &name)?;
            let c_p = mepd_normalizing_constant(alpha, &sigma).map_err(numerical)?;
            let panel = Panel { kind, d, params: &name, gold: gold.value };
            result.golds.push(gold);
            for domain in [Domain::Original, Domain::Fourier] {
                let out: Vec<(Result<EstimateReport, ExperimentError>, Duration)> = (0..cfg.replicates)
                    .into_par_iter()
                    .map(|rep| {
                        timed(|| {
                            let mut rng = replicate_stream(cfg.seed, kind, d, &name, "iid", domain.as_str(), "fresh", 0, rep);
                            match domain {
                                Domain::Original => {
                                    let s = sample_ecsd(&params, cfg.n, &mut rng).map_err(numerical)?;
                                    original_domain_mc_estimate(&s, &sech_payoff).map_err(numerical)
                                }
                                Domain::Fourier => {
                                    let s = sample_mepd(alpha, &sigma, cfg.n, &mut rng).map_err(numerical)?;
                                    fourier_iid_estimate(&s, &sech_transform, &params, &c_p).map_err(numerical)
                                }
                            }
                        })
                    })
                    .collect();
                for (rep, (report, t)) in out.into_iter().enumerate() {
                    result.rows.push(panel.row("iid", domain, rep, &report?)?);
                    result.wall_clock.push(t);
                }
            }
        }
    }
    Ok(result)
}

/// Starting point of every chain: a unit vector, away from the cusp of
/// spectral densities at the origin.
fn start_point(d: usize) -> Vec<f64> {
    vec![1.0 / (d as f64).sqrt(); d]
}

fn run_chain(
    algorithm: &str,
    value: f64,
    density: &dyn LogDensity,
    burn_in: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<MarkovChainTrace, SamplerError> {
    let d = density.dim();
    let x0 = start_point(d);
    match algorithm {
        "mala" => run_mala(density, &StepSchedule::constant(value)?, &x0, burn_in, n, rng),
        "mhis" => {
            let cov = SpdMatrix::diagonal(&vec![value * value; d]).map_err(|e| SamplerError::InvalidProposal(e.to_string()))?;
            run_mh(density, &Proposal::independence(vec![0.0; d], cov)?, &x0, burn_in, n, rng)
        }
        _ => run_mh(density, &Proposal::random_walk(d, value)?, &x0, burn_in, n, rng),
    }
}

/// A chain-based estimator of one panel in one domain.
struct ChainProblem<'a> {
    density: &'a dyn LogDensity,
    estimate: &'a (dyn Fn(&MarkovChainTrace) -> Result<EstimateReport, String> + Sync),
}

fn parameter_name(algorithm: &str) -> &'static str {
    if algorithm == "mala" {
        "gamma"
    } else {
        "scale"
    }
}

/// Grid search on tuning trajectories, then fresh trajectories at the
/// arg-min. Failed replicates are recorded and skipped.
fn tune_and_run(
    cfg: &ExperimentConfig,
    panel: &Panel,
    algorithm: &str,
    domain: Domain,
    problem: &ChainProblem,
    result: &mut RunResult,
) -> Result<(), ExperimentError> {
    let grid = cfg.grid(algorithm);
    let dname = domain.as_str();
    let run = |value: f64, phase: &str, slot: usize, rep: usize| -> Result<EstimateReport, String> {
        let mut rng = replicate_stream(cfg.seed, panel.kind, panel.d, panel.params, algorithm, dname, phase, slot, rep);
        let trace = run_chain(algorithm, value, problem.density, cfg.burn_in, cfg.n, &mut rng).map_err(|e| e.to_string())?;
        (problem.estimate)(&trace)
    };
    let mut mses = Vec::with_capacity(grid.len());
    if grid.len() > 1 {
        for (slot, &value) in grid.iter().enumerate() {
            let out: Vec<Result<EstimateReport, String>> =
                (0..cfg.replicates).into_par_iter().map(|rep| run(value, "tune", slot, rep)).collect();
            let mut estimates = Vec::with_capacity(out.len());
            for (rep, o) in out.into_iter().enumerate() {
                match o {
                    Ok(r) if r.value.is_finite() => estimates.push(r.value),
                    Ok(r) => result.failures.push(panel.failure(algorithm, domain, "tune", rep, format!("{}={value}: non-finite estimate {}", parameter_name(algorithm), r.value))),
                    Err(m) => result.failures.push(panel.failure(algorithm, domain, "tune", rep, format!("{}={value}: {m}", parameter_name(algorithm)))),
                }
            }
            mses.push(if estimates.len() == cfg.replicates { mse(&estimates, panel.gold) } else { f64::INFINITY });
        }
    } else {
        mses.push(f64::NAN);
    }
    let chosen = if grid.len() == 1 { Some(0) } else { grid_argmin(&mses) };
    for (i, (&value, &m)) in grid.iter().zip(&mses).enumerate() {
        result.tuning.push(TuningRow {
            d: panel.d,
            params: panel.params.to_string(),
            method: algorithm.to_string(),
            domain,
            parameter: parameter_name(algorithm).to_string(),
            value,
            mse: m,
            chosen: chosen == Some(i),
        });
    }
    let Some(best) = chosen else {
        result.failures.push(panel.failure(algorithm, domain, "tune", 0, "every grid value failed; no fresh trajectories".into()));
        return Ok(());
    };
    let value = grid[best];
    let out: Vec<(Result<EstimateReport, String>, Duration)> =
        (0..cfg.replicates).into_par_iter().map(|rep| timed(|| run(value, "fresh", 0, rep))).collect();
    for (rep, (o, t)) in out.into_iter().enumerate() {
        match o {
            Ok(r) if r.value.is_finite() => {
                result.rows.push(panel.row(algorithm, domain, rep, &r)?);
                result.wall_clock.push(t);
            }
            Ok(r) => result.failures.push(panel.failure(algorithm, domain, "fresh", rep, format!("non-finite estimate {}", r.value))),
            Err(m) => result.failures.push(panel.failure(algorithm, domain, "fresh", rep, m)),
        }
    }
    Ok(())
}

/// MALA, MHRW and MHIS on the Cauchy target in both domains, each tuned by
/// MSE against an i.i.d. gold estimate.
pub fn run_mcmc_cauchy(cfg: &ExperimentConfig) -> Result<RunResult, ExperimentError> {
    expect_kind(cfg, ExperimentKind::McmcCauchy)?;
    let kind = cfg.kind;
    let mut result = RunResult::new(kind, cfg.seed);
    for &d in &cfg.dims {
        let sigma = scatter_matrix(cfg, d)?;
        let params = EcsdParams::centered(1.0, sigma.clone()).map_err(numerical)?;
        let name = alpha_panel(1.0);
        let gold = sech_gold(&params, cfg.gold_samples, cfg.replicates, cfg.seed, kind, &name)?;
        let c_p = mepd_normalizing_constant(1.0, &sigma).map_err(numerical)?;
        let panel = Panel { kind, d, params: &name, gold: gold.value };
        result.golds.push(gold);
        let cauchy = EllipticalDensity::cauchy(params.clone()).map_err(numerical)?;
        let spectral = Spectral(&params);
        let original_est = |t: &MarkovChainTrace| original_domain_trace_estimate(t, &sech_payoff).map_err(|e| e.to_string());
        let fourier_est =
            |t: &MarkovChainTrace| parseval_weighted_estimate(t, &sech_transform, &params, &c_p).map_err(|e| e.to_string());
        for algorithm in &cfg.algorithms {
            let original = ChainProblem { density: &cauchy, estimate: &original_est };
            tune_and_run(cfg, &panel, algorithm, Domain::Original, &original, &mut result)?;
            let fourier = ChainProblem { density: &spectral, estimate: &fourier_est };
            tune_and_run(cfg, &panel, algorithm, Domain::Fourier, &fourier, &mut result)?;
        }
    }
    Ok(result)
}

fn cgmy_panel(p: &CgmyParams, strike: f64) -> String {
    format!(
        "C={};G={};M={};Y={};r={};T={};S0={};K={};R={}",
        p.c,
        p.g,
        p.m,
        p.y,
        p.r,
        p.t,
        p.s0,
        strike,
        p.damping()[0]
    )
}

/// Reference price: tensor quadrature for `d ≤ 3`, otherwise importance
/// sampling with a Laplace proposal pooled over `gold_samples` draws.
fn cgmy_gold(cfg: &ExperimentConfig, params: &CgmyParams, panel: &str) -> Result<GoldEstimate, ExperimentError> {
    let d = params.damping().len();
    if d <= 3 {
        let (value, err) = cgmy_quadrature_price_default(params, cfg.strike).map_err(numerical)?;
        return Ok(GoldEstimate {
            d,
            params: panel.to_string(),
            value,
            std_error: err,
            source: "quadrature".into(),
            quadrature: Some((value, err)),
        });
    }
    let chunks = cfg.replicates.max(2);
    let per_chunk = cfg.gold_samples / chunks;
    let values: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = replicate_stream(cfg.seed, cfg.kind, d, panel, "gold", "fourier", "gold", 0, c);
            cgmy_importance_sampling_estimate(params, cfg.strike, per_chunk, 1.0, 1.0, &mut rng)
                .map(|r| r.value)
                .map_err(numerical)
        })
        .collect::<Result<_, _>>()?;
    let m = values.iter().sum::<f64>() / chunks as f64;
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (chunks as f64 - 1.0);
    Ok(GoldEstimate {
        d,
        params: panel.to_string(),
        value: m,
        std_error: (var / chunks as f64).sqrt(),
        source: "importance-sampling".into(),
        quadrature: None,
    })
}

/// Put on the maximum of `d` CGMY assets: importance sampling with the
/// configured generalized Gaussian against tuned Fourier-domain MHRW.
pub fn run_cgmy_pricing(cfg: &ExperimentConfig) -> Result<RunResult, ExperimentError> {
    expect_kind(cfg, ExperimentKind::CgmyPricing)?;
    let kind = cfg.kind;
    let mut result = RunResult::new(kind, cfg.seed);
    for &d in &cfg.dims {
        let params = cfg
            .cgmy
            .with_damping(vec![cfg.cgmy.damping()[0]; d])
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        let name = cgmy_panel(&cfg.cgmy, cfg.strike);
        let gold = cgmy_gold(cfg, &params, &name)?;
        let panel = Panel { kind, d, params: &name, gold: gold.value };
        result.golds.push(gold);
        let out: Vec<(Result<EstimateReport, ExperimentError>, Duration)> = (0..cfg.replicates)
            .into_par_iter()
            .map(|rep| {
                timed(|| {
                    let mut rng = replicate_stream(cfg.seed, kind, d, &name, "is", "fourier", "fresh", 0, rep);
                    cgmy_importance_sampling_estimate(&params, cfg.strike, cfg.n, cfg.is_alpha, cfg.is_theta, &mut rng)
                        .map_err(numerical)
                })
            })
            .collect();
        for (rep, (report, t)) in out.into_iter().enumerate() {
            result.rows.push(panel.row("is", Domain::Fourier, rep, &report?)?);
            result.wall_clock.push(t);
        }
        let c_p: NormalizingConstant = cgmy_normalizing_constant(&params).map_err(numerical)?;
        let spectral = Spectral(&params);
        let estimate = |t: &MarkovChainTrace| cgmy_mcmc_estimate(&params, cfg.strike, t, &c_p).map_err(|e| e.to_string());
        let problem = ChainProblem { density: &spectral, estimate: &estimate };
        tune_and_run(cfg, &panel, "mhrw", Domain::Fourier, &problem, &mut result)?;
    }
    Ok(result)
}

/// Mass of the region of certain acceptance far out along `e`, as a report.
/// Consistent when the mass at the largest radius stays above 0.05.
fn acceptance_region_report(
    log_rho: &(dyn Fn(&[f64]) -> f64 + Sync),
    e: &[f64],
    domain: Domain,
    rng: &RngStream,
) -> Result<ErgodicityReport, ExperimentError> {
    let radii = [10.0, 100.0, 1000.0];
    let points: Vec<Vec<f64>> = radii.iter().map(|r| e.iter().map(|v| r * v).collect()).collect();
    let prop = Proposal::random_walk(e.len(), 1.0).map_err(numerical)?;
    let mass = acceptance_region_mass_probe(log_rho, &prop, &points, 4000, rng).map_err(numerical)?;
    let last = *mass.last().unwrap();
    let (verdict, note) = if last > 0.05 {
        (Verdict::Consistent, "mass of the region of certain acceptance stays bounded away from zero")
    } else {
        (Verdict::Inconclusive, "mass of the region of certain acceptance vanishes far out")
    };
    Ok(ErgodicityReport {
        probe: "acceptance-region-mass".into(),
        domain,
        radii: radii.to_vec(),
        series: vec![("mass".into(), mass)],
        verdict,
        notes: vec!["proposal=random-walk-gaussian scale=1".into(), "draws=4000".into(), note.into()],
    })
}

fn diagonal_direction(d: usize) -> Vec<f64> {
    vec![1.0 / (d as f64).sqrt(); d]
}

fn probe_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            e
        })
        .collect();
    if d > 1 {
        dirs.push(diagonal_direction(d));
    }
    dirs
}

/// Gradient-based probes (drift, gradient limit, MALA sufficient conditions,
/// acceptance region) on one log-density.
fn gradient_probes(
    density: &dyn LogDensity,
    domain: Domain,
    rng: &RngStream,
) -> Result<Vec<ErgodicityReport>, ExperimentError> {
    let d = density.dim();
    let e = diagonal_direction(d);
    let radii = default_drift_radii();
    let grad = |x: &[f64]| density.grad_log_density(x);
    let log_rho = |x: &[f64]| density.log_density(x);
    let mut out = vec![
        radial_drift_profile(&grad, &e, &radii, domain).map_err(numerical)?,
        mala_gradient_limit_probe(&grad, &probe_directions(d), &radii, domain).map_err(numerical)?,
    ];
    let mut r = rng.fork(label("mala-sufficient"));
    out.push(mala_sufficient_probe(density, 10.0, 100.0, 50, domain, &mut r).map_err(numerical)?.report);
    out.push(acceptance_region_report(&log_rho, &e, domain, &rng.fork(label("acceptance-region")))?);
    Ok(out)
}

/// Every probe in both domains for ECSD targets over the `alpha` grid.
/// Original-domain gradient probes need a closed-form density (α ∈ {1, 2});
/// moment probes fall back to a direct sample.
pub fn run_diagnostics(cfg: &ExperimentConfig) -> Result<RunResult, ExperimentError> {
    expect_kind(cfg, ExperimentKind::Diagnostics)?;
    let kind = cfg.kind;
    let mut result = RunResult::new(kind, cfg.seed);
    for &d in &cfg.dims {
        let sigma = scatter_matrix(cfg, d)?;
        for &alpha in &cfg.alphas {
            let params = EcsdParams::centered(alpha, sigma.clone()).map_err(|e| ExperimentError::Config(e.to_string()))?;
            let name = alpha_panel(alpha);
            let rng = replicate_stream(cfg.seed, kind, d, &name, "probes", "", "probe", 0, 0);
            let mut reports = Vec::new();

            let spectral = Spectral(&params);
            reports.extend(gradient_probes(&spectral, Domain::Fourier, &rng.fork(label("fourier")))?);
            let log_c_p = mepd_normalizing_constant(alpha, &sigma).map_err(numerical)?.value.ln();
            let spectral_density = |u: &[f64]| params.log_abs_cf(u) - log_c_p;
            let fourier_moment = if d <= 3 {
                exponential_moment_probe(&MomentSource::density(d, &spectral_density), &DEFAULT_S_GRID, &DEFAULT_MOMENT_RADII, Domain::Fourier)
            } else {
                let s = sample_mepd(alpha, &sigma, cfg.moment_sample, &mut rng.fork(label("mepd-sample"))).map_err(numerical)?;
                exponential_moment_probe(&MomentSource::sample(&s), &DEFAULT_S_GRID, &DEFAULT_MOMENT_RADII, Domain::Fourier)
            };
            reports.push(fourier_moment.map_err(numerical)?);

            let closed = EllipticalDensity::for_params(params.clone()).ok();
            let original_moment = match &closed {
                Some(density) if d <= 3 => {
                    let f = |x: &[f64]| density.log_density(x);
                    exponential_moment_probe(&MomentSource::density(d, &f), &DEFAULT_S_GRID, &DEFAULT_MOMENT_RADII, Domain::Original)
                }
                _ => {
                    let s = sample_ecsd(&params, cfg.moment_sample, &mut rng.fork(label("ecsd-sample"))).map_err(numerical)?;
                    exponential_moment_probe(&MomentSource::sample(&s), &DEFAULT_S_GRID, &DEFAULT_MOMENT_RADII, Domain::Original)
                }
            };
            reports.push(original_moment.map_err(numerical)?);
            if let Some(density) = &closed {
                reports.extend(gradient_probes(density, Domain::Original, &rng.fork(label("original")))?);
            }
            result.reports.extend(reports.into_iter().map(|report| LabelledReport { d, params: name.clone(), report }));
        }
    }
    Ok(result)
}
