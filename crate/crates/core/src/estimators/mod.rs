//! Estimators of `V = E_π[g]` in both domains, normalizing constants and the
//! direct samplers they rely on.

mod cgmy;
mod direct;
mod normalizing;
mod spectral;

pub use cgmy::{
    cgmy_importance_sampling_estimate, cgmy_mcmc_estimate, cgmy_normalizing_constant, cgmy_quadrature_price,
    cgmy_quadrature_price_default,
};
pub use direct::{sample_ecsd, sample_generalized_gaussian, sample_mepd, sample_one_sided_stable};
pub use normalizing::{
    mepd_normalizing_constant, mepd_normalizing_constant_closed_form, mepd_normalizing_constant_quadrature,
    normalizing_constant_quadrature,
};
pub use spectral::{
    fourier_iid_estimate, original_domain_mc_estimate, original_domain_trace_estimate, parseval_weighted_estimate,
};

use num_complex::Complex64;

use crate::kv::{fmt_f64, KvDocument, KvError};
use crate::numerics::NumericsError;
use crate::samplers::WeightScheme;
use crate::targets::TargetError;

/// Number of batches used for batch-means standard errors on traces.
pub const BATCHES: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimatorError {
    #[error("no samples to average")]
    EmptySample,
    #[error("characteristic function vanishes at {0:?}; phase undefined")]
    ZeroModulus(Vec<f64>),
    #[error("normalizing constant: closed form {closed} disagrees with quadrature {quadrature}")]
    NormalizingConstantMismatch { closed: f64, quadrature: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Kv(#[from] KvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpProvenance {
    ClosedForm,
    Quadrature,
    /// Estimators that do not use a normalizing constant.
    None,
}

impl CpProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            CpProvenance::ClosedForm => "closed-form",
            CpProvenance::Quadrature => "quadrature",
            CpProvenance::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "closed-form" => Some(CpProvenance::ClosedForm),
            "quadrature" => Some(CpProvenance::Quadrature),
            "none" => Some(CpProvenance::None),
            _ => None,
        }
    }
}

/// `C_p = ∫|F[π]|` with where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizingConstant {
    pub value: f64,
    /// Quadrature error proxy; 0 for closed forms.
    pub error: f64,
    pub provenance: CpProvenance,
}

impl NormalizingConstant {
    pub fn closed_form(value: f64) -> Self {
        NormalizingConstant {
            value,
            error: 0.0,
            provenance: CpProvenance::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub value: f64,
    pub imag_residual: f64,
    pub std_error: f64,
    pub n_effective: usize,
    pub weight_scheme: WeightScheme,
    pub c_p_value: f64,
    pub c_p_provenance: CpProvenance,
}

impl EstimateReport {
    fn new(mean: Complex64, std_error: f64, n: usize, scheme: WeightScheme, c_p: Option<NormalizingConstant>) -> Self {
        let (c_p_value, c_p_provenance) = match c_p {
            Some(c) => (c.value, c.provenance),
            None => (1.0, CpProvenance::None),
        };
        EstimateReport {
            value: mean.re,
            imag_residual: mean.im,
            std_error,
            n_effective: n,
            weight_scheme: scheme,
            c_p_value,
            c_p_provenance,
        }
    }

    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::default();
        doc.set("value", fmt_f64(self.value));
        doc.set("std_error", fmt_f64(self.std_error));
        doc.set("n_effective", self.n_effective.to_string());
        doc.set("weight_scheme", self.weight_scheme.as_str());
        doc.set("c_p_value", fmt_f64(self.c_p_value));
        doc.set("c_p_provenance", self.c_p_provenance.as_str());
        doc.set("imag_residual", fmt_f64(self.imag_residual));
        doc
    }

    pub fn render(&self) -> String {
        self.to_kv().render()
    }

    pub fn from_kv(doc: &KvDocument) -> Result<Self, EstimatorError> {
        let scheme = doc.require_str("weight_scheme")?;
        let prov = doc.require_str("c_p_provenance")?;
        Ok(EstimateReport {
            value: doc.require_f64("value")?,
            imag_residual: doc.require_f64("imag_residual")?,
            std_error: doc.require_f64("std_error")?,
            n_effective: doc
                .get("n_effective", "integer")?
                .ok_or_else(|| KvError::Missing("n_effective".into()))?,
            weight_scheme: WeightScheme::parse(scheme)
                .ok_or_else(|| EstimatorError::InvalidParameter(format!("weight_scheme {scheme:?}")))?,
            c_p_value: doc.require_f64("c_p_value")?,
            c_p_provenance: CpProvenance::parse(prov)
                .ok_or_else(|| EstimatorError::InvalidParameter(format!("c_p_provenance {prov:?}")))?,
        })
    }

    pub fn parse(text: &str) -> Result<Self, EstimatorError> {
        Self::from_kv(&KvDocument::parse(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorTag {
    EcsdDirect,
    MepdDirect,
    GeneralizedGaussian,
}

/// Independent draws stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IidSample {
    dim: usize,
    points: Vec<f64>,
    tag: GeneratorTag,
}

impl IidSample {
    pub fn new(dim: usize, points: Vec<f64>, tag: GeneratorTag) -> Result<Self, EstimatorError> {
        if dim == 0 || points.len() % dim != 0 {
            return Err(EstimatorError::Dimension {
                expected: dim,
                got: points.len(),
            });
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(EstimatorError::NonFinite("sample points"));
        }
        Ok(IidSample { dim, points, tag })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tag(&self) -> GeneratorTag {
        self.tag
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> IidSample {
        IidSample {
            dim: self.dim,
            points: self.points[..n.min(self.len()) * self.dim].to_vec(),
            tag: self.tag,
        }
    }
}

/// Plain mean of complex terms with the i.i.d. standard error of the real part.
pub(crate) fn iid_summary(terms: &[Complex64]) -> Result<(Complex64, f64), EstimatorError> {
    let n = terms.len();
    if n == 0 {
        return Err(EstimatorError::EmptySample);
    }
    let mean = terms.iter().sum::<Complex64>() / n as f64;
    let se = if n > 1 {
        let var = terms.iter().map(|t| (t.re - mean.re).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    if !(mean.re.is_finite() && mean.im.is_finite()) {
        return Err(EstimatorError::NonFinite("estimate"));
    }
    Ok((mean, se))
}

/// Weighted mean with normalized weights and a batch-means standard error
/// over contiguous batches: `SE² = B/(B−1) Σ W_j² (b_j − V)²`.
pub(crate) fn weighted_summary(terms: &[Complex64], weights: &[f64]) -> Result<(Complex64, f64), EstimatorError> {
    let n = terms.len();
    if n == 0 {
        return Err(EstimatorError::EmptySample);
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(EstimatorError::InvalidParameter(format!("weights sum to {total}")));
    }
    let mean = terms.iter().zip(weights).map(|(t, w)| t * (w / total)).sum::<Complex64>();
    let b = BATCHES.min(n);
    let mut se2 = 0.0;
    if b > 1 {
        for j in 0..b {
            let (lo, hi) = (j * n / b, (j + 1) * n / b);
            let wj: f64 = weights[lo..hi].iter().sum::<f64>() / total;
            if wj == 0.0 {
                continue;
            }
            let bj = terms[lo..hi]
                .iter()
                .zip(&weights[lo..hi])
                .map(|(t, w)| t.re * (w / total))
                .sum::<f64>()
                / wj;
            se2 += wj * wj * (bj - mean.re).powi(2);
        }
        se2 *= b as f64 / (b - 1) as f64;
    }
    if !(mean.re.is_finite() && mean.im.is_finite()) {
        return Err(EstimatorError::NonFinite("estimate"));
    }
    Ok((mean, se2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trip() {
        let r = EstimateReport {
            value: 1.0 / 3.0,
            imag_residual: -2.5e-7,
            std_error: 0.01,
            n_effective: 100,
            weight_scheme: WeightScheme::StepSize,
            c_p_value: std::f64::consts::PI,
            c_p_provenance: CpProvenance::Quadrature,
        };
        let text = r.render();
        assert!(text.contains("weight_scheme = step-proportional"));
        assert_eq!(EstimateReport::parse(&text).unwrap(), r);
    }

    #[test]
    fn weighted_summary_uniform_matches_mean() {
        let terms: Vec<Complex64> = (0..40).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let (m, se) = weighted_summary(&terms, &vec![1.0; 40]).unwrap();
        assert!((m.re - 19.5).abs() < 1e-12);
        assert!(se > 0.0);
        let (m2, _) = weighted_summary(&terms, &vec![0.25; 40]).unwrap();
        assert!((m2.re - 19.5).abs() < 1e-12);
    }

    #[test]
    fn summaries_refuse_empty() {
        assert_eq!(iid_summary(&[]), Err(EstimatorError::EmptySample));
        assert_eq!(weighted_summary(&[], &[]), Err(EstimatorError::EmptySample));
    }
}
