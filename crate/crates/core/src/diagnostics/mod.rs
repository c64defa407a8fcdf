//! Numerical evidence for (or against) geometric ergodicity of MH and MALA
//! chains on a given target. Probes return an [`ErgodicityReport`]; verdicts
//! are evidence on finite grids, never proofs.

mod moments;
mod probes;

pub use moments::{exponential_moment_probe, polar_ball_integrals, MomentSource};
pub use probes::{
    acceptance_region_mass_probe, mala_gradient_limit_probe, mala_sufficient_probe, radial_drift_profile,
    MalaSufficientReport,
};

use crate::kv::{fmt_f64, fmt_f64_list, KvDocument, KvError};

/// Default thresholds.
pub const DRIFT_THRESHOLD: f64 = -10.0;
pub const GRADIENT_THRESHOLD: f64 = 1e-3;
pub const MOMENT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_S_GRID: [f64; 4] = [0.01, 0.1, 0.5, 1.0];
pub const DEFAULT_MOMENT_RADII: [f64; 7] = [10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0];

/// 20 log-spaced radii on `[1, 100]`.
pub fn default_drift_radii() -> Vec<f64> {
    (0..20).map(|i| 10f64.powf(2.0 * i as f64 / 19.0)).collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("direction must have unit norm, got |e| = {0}")]
    NotUnit(f64),
    #[error("radii must be positive and strictly increasing")]
    BadRadii,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("no density and no sample given")]
    NoSource,
    #[error("invalid probe setting: {0}")]
    Invalid(String),
    #[error(transparent)]
    Kv(#[from] KvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Original,
    Fourier,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Original => "original",
            Domain::Fourier => "fourier",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "original" => Some(Domain::Original),
            "fourier" => Some(Domain::Fourier),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent-with-geometric-ergodicity",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "consistent-with-geometric-ergodicity" => Some(Verdict::Consistent),
            "inconsistent" => Some(Verdict::Inconsistent),
            "inconclusive" => Some(Verdict::Inconclusive),
            _ => None,
        }
    }
}

/// One probe's evidence: a named row of values per series along `radii`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicityReport {
    pub probe: String,
    pub domain: Domain,
    pub radii: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl ErgodicityReport {
    pub fn values(&self) -> &[f64] {
        &self.series[0].1
    }

    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::default();
        doc.set("probe", self.probe.clone());
        doc.set("domain", self.domain.as_str());
        doc.set("radii", fmt_f64_list(&self.radii));
        doc.set("series", self.series.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join(","));
        for (label, vals) in &self.series {
            doc.set(format!("values.{label}"), fmt_f64_list(vals));
        }
        doc.set("verdict", self.verdict.as_str());
        doc.set("notes", self.notes.join(" | "));
        doc
    }

    pub fn render(&self) -> String {
        self.to_kv().render()
    }

    pub fn from_kv(doc: &KvDocument) -> Result<Self, DiagnosticsError> {
        let domain = doc.require_str("domain")?;
        let verdict = doc.require_str("verdict")?;
        let labels: Vec<String> = doc
            .require_str("series")?
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        let mut series = Vec::new();
        for l in labels {
            let vals = doc.f64_list(&format!("values.{l}"))?.unwrap_or_default();
            series.push((l, vals));
        }
        let notes = doc.get_str("notes").unwrap_or("");
        Ok(ErgodicityReport {
            probe: doc.require_str("probe")?.to_string(),
            domain: Domain::parse(domain).ok_or_else(|| DiagnosticsError::Invalid(format!("domain {domain:?}")))?,
            radii: doc.f64_list("radii")?.unwrap_or_default(),
            series,
            verdict: Verdict::parse(verdict).ok_or_else(|| DiagnosticsError::Invalid(format!("verdict {verdict:?}")))?,
            notes: if notes.is_empty() {
                Vec::new()
            } else {
                notes.split(" | ").map(str::to_string).collect()
            },
        })
    }
}

/// Records separated by blank lines.
pub fn render_reports(reports: &[ErgodicityReport]) -> String {
    reports.iter().map(|r| r.render()).collect::<Vec<_>>().join("\n")
}

pub fn parse_reports(text: &str) -> Result<Vec<ErgodicityReport>, DiagnosticsError> {
    text.split("\n\n")
        .filter(|chunk| !chunk.trim().is_empty())
        .map(|chunk| ErgodicityReport::from_kv(&KvDocument::parse(chunk)?))
        .collect()
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<(), DiagnosticsError> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DiagnosticsError::BadRadii);
    }
    Ok(())
}

pub(crate) fn fmt_list_note(name: &str, xs: &[f64]) -> String {
    format!("{name}={}", xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trip() {
        let r = ErgodicityReport {
            probe: "radial-drift".into(),
            domain: Domain::Fourier,
            radii: vec![1.0, 2.0, 4.0],
            series: vec![("e0".into(), vec![-1.0, -1.5, -1.0 / 3.0]), ("e1".into(), vec![0.0, 1e-300, 5.0])],
            verdict: Verdict::Inconclusive,
            notes: vec!["first".into(), "second note".into()],
        };
        let many = render_reports(&[r.clone(), r.clone()]);
        let back = parse_reports(&many).unwrap();
        assert_eq!(back, vec![r.clone(), r]);
    }

    #[test]
    fn default_radii_span() {
        let r = default_drift_radii();
        assert_eq!(r.len(), 20);
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[19] - 100.0).abs() < 1e-12);
        assert!(check_radii(&r).is_ok());
        assert!(check_radii(&[1.0, 1.0]).is_err());
    }
}
