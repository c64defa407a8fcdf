//! Tensor-product quadrature on boxes of dimension at most three.
//!
//! This is the ground-truth oracle for Parseval integrals and normalizing
//! constants. Each result carries a crude error proxy: the absolute
//! difference against the same rule at half resolution.

use num_complex::Complex64;
use rayon::prelude::*;

use super::NumericsError;

pub const MAX_QUADRATURE_DIM: usize = 3;
pub const DEFAULT_NODE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Trapezoid,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Self {
        Self { lo, hi, nodes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    axes: Vec<Axis>,
    rule: QuadratureRule,
    cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// |value − value at half resolution|
    pub error: f64,
}

impl QuadratureGrid {
    pub fn new(axes: Vec<Axis>, rule: QuadratureRule) -> Result<Self, NumericsError> {
        Self::with_cap(axes, rule, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(
        axes: Vec<Axis>,
        rule: QuadratureRule,
        cap: usize,
    ) -> Result<Self, NumericsError> {
        if axes.is_empty() || axes.len() > MAX_QUADRATURE_DIM {
            return Err(NumericsError::InvalidGrid(format!(
                "grid dimension must be in 1..={MAX_QUADRATURE_DIM}, got {}",
                axes.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if !(a.lo < a.hi) || !a.lo.is_finite() || !a.hi.is_finite() {
                return Err(NumericsError::InvalidGrid(format!(
                    "axis {i}: need finite lo < hi, got [{}, {}]",
                    a.lo, a.hi
                )));
            }
            if a.nodes < 2 {
                return Err(NumericsError::InvalidGrid(format!(
                    "axis {i}: need at least 2 nodes, got {}",
                    a.nodes
                )));
            }
        }
        let total = axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.nodes))
            .unwrap_or(usize::MAX);
        if total > cap {
            return Err(NumericsError::NodeCapExceeded { nodes: total, cap });
        }
        Ok(Self { axes, rule, cap })
    }

    /// Same box and node count on every axis.
    pub fn cube(
        dim: usize,
        lo: f64,
        hi: f64,
        nodes: usize,
        rule: QuadratureRule,
    ) -> Result<Self, NumericsError> {
        Self::new(vec![Axis::new(lo, hi, nodes); dim], rule)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn total_nodes(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    fn halved(&self) -> Self {
        let axes = self
            .axes
            .iter()
            .map(|a| {
                let nodes = match self.rule {
                    QuadratureRule::Trapezoid => (a.nodes + 1) / 2,
                    QuadratureRule::GaussLegendre => a.nodes / 2,
                }
                .max(2);
                Axis { nodes, ..*a }
            })
            .collect();
        Self {
            axes,
            rule: self.rule,
            cap: self.cap,
        }
    }

    fn axis_rules(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.axes
            .iter()
            .map(|a| match self.rule {
                QuadratureRule::Trapezoid => trapezoid_rule(a.lo, a.hi, a.nodes),
                QuadratureRule::GaussLegendre => gauss_legendre_rule(a.lo, a.hi, a.nodes),
            })
            .collect()
    }

    /// All tensor nodes with their product weights.
    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        let rules = self.axis_rules();
        let mut out = Vec::with_capacity(self.total_nodes());
        let mut idx = vec![0usize; rules.len()];
        loop {
            let point: Vec<f64> = idx.iter().zip(&rules).map(|(&i, r)| r.0[i]).collect();
            let w: f64 = idx.iter().zip(&rules).map(|(&i, r)| r.1[i]).product();
            out.push((point, w));
            if !advance(&mut idx, &rules) {
                break;
            }
        }
        out
    }

    fn raw_integrate<F>(&self, f: &F) -> Complex64
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let rules = self.axis_rules();
        let (first, rest) = rules.split_first().expect("non-empty grid");
        let partial: Vec<Complex64> = (0..first.0.len())
            .into_par_iter()
            .map(|i0| {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut point = vec![0.0; rules.len()];
                point[0] = first.0[i0];
                if rest.is_empty() {
                    return f(&point) * first.1[i0];
                }
                let mut idx = vec![0usize; rest.len()];
                loop {
                    let mut w = first.1[i0];
                    for (k, (&i, r)) in idx.iter().zip(rest).enumerate() {
                        point[k + 1] = r.0[i];
                        w *= r.1[i];
                    }
                    sum += f(&point) * w;
                    if !advance(&mut idx, rest) {
                        break;
                    }
                }
                sum
            })
            .collect();
        partial.into_iter().sum()
    }

    pub fn integrate<F>(&self, f: F) -> Result<QuadResult, NumericsError>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let value = self.raw_integrate(&f);
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(NumericsError::NonFinite("quadrature value"));
        }
        let coarse = self.halved().raw_integrate(&f);
        Ok(QuadResult {
            value,
            error: (value - coarse).norm(),
        })
    }

    pub fn integrate_real<F>(&self, f: F) -> Result<(f64, f64), NumericsError>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let r = self.integrate(|x| Complex64::new(f(x), 0.0))?;
        Ok((r.value.re, r.error))
    }
}

fn advance(idx: &mut [usize], rules: &[(Vec<f64>, Vec<f64>)]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < rules[k].0.len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Free-function form of [`QuadratureGrid::integrate`].
pub fn quad_integrate<F>(f: F, grid: &QuadratureGrid) -> Result<QuadResult, NumericsError>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    grid.integrate(f)
}

pub fn trapezoid_rule(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (hi - lo) / (n - 1) as f64;
    let x = (0..n).map(|i| lo + h * i as f64).collect();
    let w = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    (x, w)
}

/// Gauss–Legendre nodes and weights on `[lo, hi]` by Newton iteration on Pₙ.
pub fn gauss_legendre_rule(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = half * wi;
        w[n - 1 - i] = half * wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
