//! Configuration-driven runners for the three numerical studies and the
//! diagnostics suite, with CSV and SVG output.
//!
//! Each runner returns a [`RunResult`]; [`emit_outputs`] writes it. Replicates
//! run on the rayon pool, each on its own [`RngStream`] keyed by the
//! replicate's label path, so results do not depend on scheduling.

mod config;
mod gold;
mod output;
mod plot;
mod runners;
mod tuning;

pub use config::{ExperimentConfig, ExperimentKind};
pub use gold::{ecsd_sech_quadrature, GoldEstimate};
pub use output::{emit_outputs, parse_estimates_csv, parse_reports_txt, quartiles, EstimateRow, Quartiles, ESTIMATE_COLUMNS};
pub use runners::{run_cgmy_pricing, run_diagnostics, run_experiment, run_mc_comparison, run_mcmc_cauchy};
pub use tuning::{grid_argmin, TuningRow};

use std::time::Duration;

use crate::diagnostics::{Domain, ErgodicityReport};
use crate::numerics::rng::label;
use crate::numerics::RngStream;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    /// Process exit code: 2 for configuration errors, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Numerical(_) => 3,
            ExperimentError::Io { .. } => 1,
        }
    }
}

impl From<crate::kv::KvError> for ExperimentError {
    fn from(e: crate::kv::KvError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

impl From<crate::targets::spec::SpecError> for ExperimentError {
    fn from(e: crate::targets::spec::SpecError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

pub(crate) fn numerical(e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Numerical(e.to_string())
}

/// A replicate that could not produce an estimate; recorded, not fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub d: usize,
    pub params: String,
    pub method: String,
    pub domain: Domain,
    pub phase: String,
    pub replicate: usize,
    pub message: String,
}

/// A diagnostics report together with the target it was run on.
#[derive(Debug, Clone)]
pub struct LabelledReport {
    pub d: usize,
    pub params: String,
    pub report: ErgodicityReport,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub rows: Vec<EstimateRow>,
    pub golds: Vec<GoldEstimate>,
    pub tuning: Vec<TuningRow>,
    pub failures: Vec<Failure>,
    pub reports: Vec<LabelledReport>,
    /// Wall-clock time of each row in `rows`, same order.
    pub wall_clock: Vec<Duration>,
}

impl RunResult {
    pub(crate) fn new(experiment: ExperimentKind, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            rows: Vec::new(),
            golds: Vec::new(),
            tuning: Vec::new(),
            failures: Vec::new(),
            reports: Vec::new(),
            wall_clock: Vec::new(),
        }
    }

    /// Rows of one method/domain pair in a panel, in replicate order.
    pub fn rows_for<'a>(
        &'a self,
        d: usize,
        params: &'a str,
        method: &'a str,
        domain: Domain,
    ) -> impl Iterator<Item = &'a EstimateRow> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.d == d && r.params == params && r.method == method && r.domain == domain)
    }

    pub fn chosen_parameter(&self, d: usize, method: &str, domain: Domain) -> Option<f64> {
        self.tuning
            .iter()
            .find(|t| t.d == d && t.method == method && t.domain == domain && t.chosen)
            .map(|t| t.value)
    }

    pub fn gold(&self, d: usize, params: &str) -> Option<&GoldEstimate> {
        self.golds.iter().find(|g| g.d == d && g.params == params)
    }
}

/// `(estimate − gold)/|gold|`.
pub fn relative_error(estimate: f64, gold: f64) -> Result<f64, ExperimentError> {
    if gold == 0.0 || !gold.is_finite() {
        return Err(ExperimentError::Numerical(format!("gold estimate must be finite and non-zero, got {gold}")));
    }
    Ok((estimate - gold) / gold.abs())
}

/// The stream of one replicate: `[experiment, d, params, method, domain, phase, slot, replicate]`.
pub(crate) fn replicate_stream(
    seed: u64,
    kind: ExperimentKind,
    d: usize,
    params: &str,
    method: &str,
    domain: &str,
    phase: &str,
    slot: usize,
    replicate: usize,
) -> RngStream {
    RngStream::from_path(
        seed,
        &[
            label(kind.as_str()),
            d as u64,
            label(params),
            label(method),
            label(domain),
            label(phase),
            slot as u64,
            replicate as u64,
        ],
    )
}
