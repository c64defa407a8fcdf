//! Targets known through their characteristic function.
//!
//! A [`CharacteristicTarget`] exposes `F[π](u)`, the spectral log-density
//! `log p(u) = log|F[π](u)|` (up to the normalizing constant) and its
//! gradient. Damped targets evaluate `F[π](u − iR)` instead. Samplers only see
//! the [`LogDensity`] view, so original-domain densities implement the same
//! interface.

mod cgmy;
mod ecsd;
mod levy;
mod payoff;
pub mod spec;

pub use cgmy::CgmyParams;
pub use ecsd::{EcsdParams, EllipticalDensity};
pub use levy::{LevyDensity, LevyTriplet};
pub use payoff::{max_put_payoff, max_put_payoff_ft, sech_payoff, sech_payoff_ft};
pub use spec::TargetSpec;

use num_complex::Complex64;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TargetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gradient is singular at {0:?}")]
    Singular(Vec<f64>),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("dimension mismatch: target has d={expected}, point has {got} coordinates")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub trait CharacteristicTarget: Send + Sync {
    fn dim(&self) -> usize;

    /// `F[π](u)` (or `F[π](u − iR)` for damped targets).
    fn cf(&self, u: &[f64]) -> Complex64 {
        self.phase(u) * self.log_abs_cf(u).exp()
    }

    fn log_abs_cf(&self, u: &[f64]) -> f64;

    fn grad_log_abs_cf(&self, u: &[f64]) -> Result<Vec<f64>, TargetError>;

    /// `F[π](u) / |F[π](u)|`.
    fn phase(&self, u: &[f64]) -> Complex64;
}

/// Unnormalized log-density with gradient; what the samplers consume.
pub trait LogDensity: Send + Sync {
    fn dim(&self) -> usize;

    fn log_density(&self, x: &[f64]) -> f64;

    fn grad_log_density(&self, x: &[f64]) -> Result<Vec<f64>, TargetError>;
}

/// The spectral density `p ∝ |F[π]|` of a characteristic target.
#[derive(Debug, Clone, Copy)]
pub struct Spectral<'a, T: ?Sized>(pub &'a T);

impl<T: CharacteristicTarget + ?Sized> LogDensity for Spectral<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        self.0.log_abs_cf(x)
    }

    fn grad_log_density(&self, x: &[f64]) -> Result<Vec<f64>, TargetError> {
        self.0.grad_log_abs_cf(x)
    }
}

/// A log-density given by closures; handy for tests and diagnostics.
pub struct FnDensity<F, G> {
    dim: usize,
    log_density: F,
    gradient: G,
}

impl<F, G> FnDensity<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(dim: usize, log_density: F, gradient: G) -> Self {
        Self {
            dim,
            log_density,
            gradient,
        }
    }
}

impl<F, G> LogDensity for FnDensity<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        (self.log_density)(x)
    }

    fn grad_log_density(&self, x: &[f64]) -> Result<Vec<f64>, TargetError> {
        Ok((self.gradient)(x))
    }
}

/// Central finite-difference gradient with step `h·(1 + |x|)`.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let step = h * (1.0 + crate::numerics::norm(x));
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + step;
            let up = f(&probe);
            probe[i] = x[i] - step;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<(), TargetError> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(TargetError::Dimension {
            expected,
            got: x.len(),
        })
    }
}
