//! Metropolis–Hastings and MALA kernels.
//!
//! All samplers run against a [`LogDensity`](crate::targets::LogDensity), so
//! the same code drives chains in the original domain (log π) and in the
//! Fourier domain (log |F[π]|). Each run returns an immutable
//! [`MarkovChainTrace`].

mod mala;
mod mh;
mod proposal;
mod trace;

pub use mala::{run_mala, LangevinKernel, StepSchedule};
pub use mh::{acceptance_probability, mh_acceptance, run_mh};
pub use proposal::{draw_generalized_gaussian, generalized_gaussian_log_density, Proposal};
pub use trace::{MarkovChainTrace, TraceDump, WeightScheme};

use crate::targets::TargetError;

/// Defaults for the burn-in length and number of effective samples.
pub const DEFAULT_BURN_IN: usize = 5_000;
pub const DEFAULT_EFFECTIVE: usize = 100_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("log-density is not finite at the starting point {0:?}")]
    NonFiniteStart(Vec<f64>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid proposal: {0}")]
    InvalidProposal(String),
    #[error("invalid step schedule: {0}")]
    InvalidSchedule(String),
    #[error("gradient failure at step {step}: {source}")]
    GradientFailure { step: usize, source: TargetError },
    #[error("empty effective window")]
    EmptyWindow,
    #[error("trace dump: {0}")]
    Dump(String),
}
