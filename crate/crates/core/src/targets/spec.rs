//! Target specifications as flat key-value documents.
//!
//! ```text
//! kind = ecsd            # ecsd | cauchy | levy-triplet | cgmy
//! alpha = 1.5
//! sigma = 2, 1; 1, 2     # row-major, or `sigma_diag = 1, 2`
//! mu = 0, 0
//! ```
//!
//! `levy-triplet` adds `nu` (`none`, `gaussian`, `uniform`, `power`) with
//! `nu_intensity`, `nu_scale`, `nu_half_width`, `nu_power`, and optional
//! `grid_half_width`, `grid_nodes`, `grid_rule`. `cgmy` reads `c, g, m, y, r,
//! t, s0, strike` and `damping` (one value per coordinate, or a single value
//! with `dim`).

use std::f64::consts::PI;
use std::sync::Arc;

use super::{CgmyParams, CharacteristicTarget, EcsdParams, LevyDensity, LevyTriplet, TargetError};
use crate::kv::{KvDocument, KvError};
use crate::numerics::{QuadratureGrid, QuadratureRule, SpdMatrix};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error(transparent)]
    Kv(#[from] KvError),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::numerics::NumericsError> for SpecError {
    fn from(e: crate::numerics::NumericsError) -> Self {
        SpecError::Target(e.into())
    }
}

#[derive(Debug, Clone)]
pub enum TargetSpec {
    Ecsd(EcsdParams),
    Cauchy(EcsdParams),
    LevyTriplet(LevyTriplet),
    Cgmy { params: CgmyParams, strike: f64 },
}

impl TargetSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TargetSpec::Ecsd(_) => "ecsd",
            TargetSpec::Cauchy(_) => "cauchy",
            TargetSpec::LevyTriplet(_) => "levy-triplet",
            TargetSpec::Cgmy { .. } => "cgmy",
        }
    }

    pub fn characteristic(&self) -> &dyn CharacteristicTarget {
        match self {
            TargetSpec::Ecsd(p) | TargetSpec::Cauchy(p) => p,
            TargetSpec::LevyTriplet(t) => t,
            TargetSpec::Cgmy { params, .. } => params,
        }
    }

    pub fn parse(text: &str) -> Result<Self, SpecError> {
        Self::from_kv(&KvDocument::parse(text)?, "")
    }

    /// Reads keys under `prefix` (e.g. `"target."`, or `""` for a bare document).
    pub fn from_kv(doc: &KvDocument, prefix: &str) -> Result<Self, SpecError> {
        let key = |k: &str| format!("{prefix}{k}");
        let kind = doc.require_str(&key("kind"))?;
        match kind {
            "ecsd" | "cauchy" => {
                let alpha = if kind == "cauchy" {
                    let a = doc.f64_or(&key("alpha"), 1.0)?;
                    if a != 1.0 {
                        return Err(SpecError::Invalid(format!(
                            "kind = cauchy requires alpha = 1, got {a}"
                        )));
                    }
                    1.0
                } else {
                    doc.require_f64(&key("alpha"))?
                };
                let sigma = read_spd(doc, prefix)?;
                let d = sigma.dim();
                let mu = doc.f64_list(&key("mu"))?.unwrap_or_else(|| vec![0.0; d]);
                let p = EcsdParams::new(alpha, sigma, mu)?;
                Ok(if kind == "cauchy" {
                    TargetSpec::Cauchy(p)
                } else {
                    TargetSpec::Ecsd(p)
                })
            }
            "levy-triplet" => Ok(TargetSpec::LevyTriplet(read_levy(doc, prefix)?)),
            "cgmy" => {
                let damping = match doc.f64_list(&key("damping"))? {
                    Some(r) if r.len() == 1 => vec![r[0]; doc.usize_or(&key("dim"), 1)?],
                    Some(r) => r,
                    None => vec![-1.5; doc.usize_or(&key("dim"), 1)?],
                };
                let params = CgmyParams::new(
                    doc.f64_or(&key("c"), 1.0)?,
                    doc.f64_or(&key("g"), 5.0)?,
                    doc.f64_or(&key("m"), 5.0)?,
                    doc.f64_or(&key("y"), 0.5)?,
                    doc.f64_or(&key("r"), 0.1)?,
                    doc.f64_or(&key("t"), 1.0)?,
                    doc.f64_or(&key("s0"), 100.0)?,
                    damping,
                )?;
                let strike = doc.f64_or(&key("strike"), 100.0)?;
                if !(strike > 0.0) {
                    return Err(SpecError::Invalid(format!("strike must be positive, got {strike}")));
                }
                Ok(TargetSpec::Cgmy { params, strike })
            }
            other => Err(SpecError::Invalid(format!(
                "unknown target kind `{other}` (expected ecsd, cauchy, levy-triplet or cgmy)"
            ))),
        }
    }
}

fn infer_dim(doc: &KvDocument, prefix: &str) -> Result<usize, SpecError> {
    if let Some(d) = doc.get::<usize>(&format!("{prefix}dim"), "a positive integer")? {
        return Ok(d);
    }
    if let Some(diag) = doc.f64_list(&format!("{prefix}sigma_diag"))? {
        return Ok(diag.len());
    }
    if let Some(mu) = doc.f64_list(&format!("{prefix}mu"))? {
        return Ok(mu.len());
    }
    if let Some(s) = doc.f64_list(&format!("{prefix}sigma"))? {
        let d = (s.len() as f64).sqrt().round() as usize;
        if d * d == s.len() {
            return Ok(d);
        }
    }
    Ok(1)
}

fn read_matrix(doc: &KvDocument, prefix: &str, default_identity: bool) -> Result<Vec<f64>, SpecError> {
    let d = infer_dim(doc, prefix)?;
    if let Some(diag) = doc.f64_list(&format!("{prefix}sigma_diag"))? {
        if diag.len() != d {
            return Err(SpecError::Invalid(format!("sigma_diag needs {d} entries")));
        }
        let mut m = vec![0.0; d * d];
        for (i, v) in diag.into_iter().enumerate() {
            m[i * d + i] = v;
        }
        return Ok(m);
    }
    match doc.f64_list(&format!("{prefix}sigma"))? {
        Some(s) if s.len() == 1 && d > 1 => {
            let mut m = vec![0.0; d * d];
            for i in 0..d {
                m[i * d + i] = s[0];
            }
            Ok(m)
        }
        Some(s) if s.len() == d * d => Ok(s),
        Some(s) => Err(SpecError::Invalid(format!(
            "sigma has {} entries, expected {}",
            s.len(),
            d * d
        ))),
        None => {
            let mut m = vec![0.0; d * d];
            if default_identity {
                for i in 0..d {
                    m[i * d + i] = 1.0;
                }
            }
            Ok(m)
        }
    }
}

fn read_spd(doc: &KvDocument, prefix: &str) -> Result<SpdMatrix, SpecError> {
    let m = read_matrix(doc, prefix, true)?;
    let d = (m.len() as f64).sqrt().round() as usize;
    Ok(SpdMatrix::new(d, m)?)
}

fn read_levy(doc: &KvDocument, prefix: &str) -> Result<LevyTriplet, SpecError> {
    let key = |k: &str| format!("{prefix}{k}");
    let sigma = read_matrix(doc, prefix, false)?;
    let d = (sigma.len() as f64).sqrt().round() as usize;
    let mu = doc.f64_list(&key("mu"))?.unwrap_or_else(|| vec![0.0; d]);
    let intensity = doc.f64_or(&key("nu_intensity"), 1.0)?;
    let nu: LevyDensity = match doc.get_str(&key("nu")).unwrap_or("none") {
        "none" => Arc::new(|_: &[f64]| 0.0),
        "gaussian" => {
            let s = doc.f64_or(&key("nu_scale"), 1.0)?;
            let norm = intensity / (2.0 * PI * s * s).powf(0.5 * d as f64);
            Arc::new(move |x: &[f64]| {
                norm * (-0.5 * x.iter().map(|v| v * v).sum::<f64>() / (s * s)).exp()
            })
        }
        "uniform" => {
            let h = doc.f64_or(&key("nu_half_width"), 1.0)?;
            let level = intensity / (2.0 * h).powi(d as i32);
            Arc::new(move |x: &[f64]| {
                if x.iter().all(|v| v.abs() <= h) {
                    level
                } else {
                    0.0
                }
            })
        }
        "power" => {
            let p = doc.f64_or(&key("nu_power"), 2.0)?;
            let s = doc.f64_or(&key("nu_scale"), 1.0)?;
            Arc::new(move |x: &[f64]| {
                intensity / (1.0 + x.iter().map(|v| v * v).sum::<f64>() / (s * s)).powf(p)
            })
        }
        other => {
            return Err(SpecError::Invalid(format!(
                "unknown nu family `{other}` (expected none, gaussian, uniform or power)"
            )))
        }
    };
    let grid = if doc.contains(&key("grid_half_width")) || doc.contains(&key("grid_nodes")) {
        let h = doc.f64_or(&key("grid_half_width"), 25.0)?;
        let default_nodes = match d {
            1 => 2001,
            2 => 301,
            _ => 101,
        };
        let nodes = doc.usize_or(&key("grid_nodes"), default_nodes)?;
        let rule = match doc.get_str(&key("grid_rule")).unwrap_or("trapezoid") {
            "trapezoid" => QuadratureRule::Trapezoid,
            "gauss-legendre" => QuadratureRule::GaussLegendre,
            other => return Err(SpecError::Invalid(format!("unknown grid_rule `{other}`"))),
        };
        Some(QuadratureGrid::cube(d, -h, h, nodes, rule)?)
    } else {
        None
    };
    Ok(LevyTriplet::new(sigma, mu, nu, grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let t = TargetSpec::parse("kind = ecsd\nalpha = 1.5\nsigma = 2,1;1,2\n").unwrap();
        assert_eq!(t.kind(), "ecsd");
        assert_eq!(t.characteristic().dim(), 2);

        let t = TargetSpec::parse("kind = cauchy\nsigma_diag = 0.2, 0.4\n").unwrap();
        assert!(matches!(t, TargetSpec::Cauchy(ref p) if p.alpha() == 1.0));

        let t = TargetSpec::parse("kind = levy-triplet\nsigma = 1\nnu = gaussian\nnu_intensity = 2\n")
            .unwrap();
        assert_eq!(t.characteristic().dim(), 1);

        let t = TargetSpec::parse("kind = cgmy\ndim = 3\ndamping = -1.5\n").unwrap();
        match t {
            TargetSpec::Cgmy { params, strike } => {
                assert_eq!(params.damping(), &[-1.5, -1.5, -1.5]);
                assert_eq!(strike, 100.0);
            }
            _ => panic!("expected cgmy"),
        }
    }

    #[test]
    fn reports_bad_documents() {
        assert!(TargetSpec::parse("alpha = 1\n").is_err());
        assert!(TargetSpec::parse("kind = weird\n").is_err());
        assert!(TargetSpec::parse("kind = cauchy\nalpha = 1.5\n").is_err());
        assert!(TargetSpec::parse("kind = ecsd\nalpha = 3\n").is_err());
        assert!(TargetSpec::parse("kind = cgmy\ndamping = -6\n").is_err());
    }
}
