//! Experiment configuration files.
//!
//! ```text
//! experiment = mcmc-cauchy
//! d = 2
//! replicates = 20
//! n = 20000
//! burn_in = 5000
//! seed = 1
//! algorithms = mhrw, mala
//! tune.mhrw = 0.5, 1, 2, 4
//! ```
//!
//! CGMY parameters use the target schema under `target.` (`target.c`,
//! `target.damping`, `target.strike`, ...).

use std::path::PathBuf;

use super::ExperimentError;
use crate::kv::{fmt_f64, fmt_f64_list, KvDocument};
use crate::targets::{CgmyParams, TargetSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    McComparison,
    McmcCauchy,
    CgmyPricing,
    Diagnostics,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::McComparison,
        ExperimentKind::McmcCauchy,
        ExperimentKind::CgmyPricing,
        ExperimentKind::Diagnostics,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::McComparison => "mc-comparison",
            ExperimentKind::McmcCauchy => "mcmc-cauchy",
            ExperimentKind::CgmyPricing => "cgmy-pricing",
            ExperimentKind::Diagnostics => "diagnostics",
        }
    }

    /// Name of the CLI subcommand.
    pub fn subcommand(self) -> &'static str {
        match self {
            ExperimentKind::McComparison => "mc-compare",
            ExperimentKind::McmcCauchy => "mcmc-cauchy",
            ExperimentKind::CgmyPricing => "cgmy",
            ExperimentKind::Diagnostics => "diagnose",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s || k.subcommand() == s)
    }
}

pub const ALGORITHMS: [&str; 3] = ["mala", "mhrw", "mhis"];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub dims: Vec<usize>,
    /// Stable indices (mc-comparison, diagnostics).
    pub alphas: Vec<f64>,
    pub replicates: usize,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Total i.i.d. draws behind a gold estimate, split across `replicates` chunks.
    pub gold_samples: usize,
    pub algorithms: Vec<String>,
    pub mhrw_grid: Vec<f64>,
    pub mhis_grid: Vec<f64>,
    pub mala_grid: Vec<f64>,
    /// `D = diag(step, 2·step, …, d·step)`.
    pub diag_step: f64,
    pub random_rotation: bool,
    /// One-dimensional CGMY template; other dimensions repeat its damping.
    pub cgmy: CgmyParams,
    pub strike: f64,
    pub is_alpha: f64,
    pub is_theta: f64,
    /// Sample size for sample-based moment probes.
    pub moment_sample: usize,
    pub out: PathBuf,
    pub paper_scale: bool,
}

const KNOWN_KEYS: [&str; 19] = [
    "experiment",
    "paper_scale",
    "d",
    "alpha",
    "replicates",
    "n",
    "burn_in",
    "seed",
    "gold_samples",
    "algorithms",
    "tune.mhrw",
    "tune.mhis",
    "tune.mala",
    "diag_step",
    "random_rotation",
    "is_alpha",
    "is_theta",
    "moment_sample",
    "out",
];

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (dims, alphas, diag_step, n) = match kind {
            ExperimentKind::McComparison => (vec![5], vec![1.0, 1.2, 1.4, 1.6, 1.8], 1.0, 20_000),
            ExperimentKind::McmcCauchy => (vec![2], vec![1.0], 0.2, 20_000),
            ExperimentKind::CgmyPricing => (vec![1, 2], vec![], 1.0, 10_000),
            ExperimentKind::Diagnostics => (vec![2], vec![1.0, 1.5, 2.0], 1.0, 20_000),
        };
        let mhrw_grid = match kind {
            ExperimentKind::CgmyPricing => vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            _ => vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
        };
        Self {
            kind,
            dims,
            alphas,
            replicates: 20,
            n,
            burn_in: 5000,
            seed: 1,
            gold_samples: 10_000_000,
            algorithms: ALGORITHMS.iter().map(|s| s.to_string()).collect(),
            mhrw_grid,
            mhis_grid: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            mala_grid: vec![0.01, 0.03, 0.1, 0.3, 1.0],
            diag_step,
            random_rotation: true,
            cgmy: CgmyParams::reference(1),
            strike: 100.0,
            is_alpha: 2.0,
            is_theta: 2.0,
            moment_sample: 200_000,
            out: PathBuf::from("results").join(kind.subcommand()),
            paper_scale: false,
        }
    }

    /// 100 replicates; `n = 100000` (10000 for CGMY), burn-in 5000.
    pub fn apply_paper_scale(&mut self) {
        self.paper_scale = true;
        self.replicates = 100;
        self.n = match self.kind {
            ExperimentKind::CgmyPricing => 10_000,
            _ => 100_000,
        };
        self.burn_in = 5000;
    }

    pub fn parse(text: &str, kind: Option<ExperimentKind>) -> Result<Self, ExperimentError> {
        Self::from_kv(&KvDocument::parse(text)?, kind)
    }

    /// Reads a config; `kind` (from the subcommand) must agree with an
    /// `experiment` key when both are present.
    pub fn from_kv(doc: &KvDocument, kind: Option<ExperimentKind>) -> Result<Self, ExperimentError> {
        let file_kind = match doc.get_str("experiment") {
            Some(s) => Some(ExperimentKind::parse(s).ok_or_else(|| {
                ExperimentError::Config(format!("unknown experiment `{s}`"))
            })?),
            None => None,
        };
        let kind = match (kind, file_kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(ExperimentError::Config(format!(
                    "config is for `{}` but the subcommand runs `{}`",
                    b.as_str(),
                    a.as_str()
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(ExperimentError::Config("missing key `experiment`".into())),
        };
        if let Some(k) = doc.keys().find(|k| !KNOWN_KEYS.contains(k) && !k.starts_with("target.")) {
            return Err(ExperimentError::Config(format!("unknown config key `{k}`")));
        }
        let mut cfg = Self::defaults(kind);
        if doc.bool_or("paper_scale", false)? {
            cfg.apply_paper_scale();
        }
        if let Some(d) = doc.usize_list("d")? {
            cfg.dims = d;
        }
        if let Some(a) = doc.f64_list("alpha")? {
            cfg.alphas = a;
        }
        cfg.replicates = doc.usize_or("replicates", cfg.replicates)?;
        cfg.n = doc.usize_or("n", cfg.n)?;
        cfg.burn_in = doc.usize_or("burn_in", cfg.burn_in)?;
        cfg.seed = doc.u64_or("seed", cfg.seed)?;
        cfg.gold_samples = doc.usize_or("gold_samples", cfg.gold_samples)?;
        if let Some(a) = doc.list::<String>("algorithms", "a list of algorithm names")? {
            cfg.algorithms = a;
        }
        for (key, grid) in [
            ("tune.mhrw", &mut cfg.mhrw_grid),
            ("tune.mhis", &mut cfg.mhis_grid),
            ("tune.mala", &mut cfg.mala_grid),
        ] {
            if let Some(g) = doc.f64_list(key)? {
                *grid = g;
            }
        }
        cfg.diag_step = doc.f64_or("diag_step", cfg.diag_step)?;
        cfg.random_rotation = doc.bool_or("random_rotation", cfg.random_rotation)?;
        cfg.is_alpha = doc.f64_or("is_alpha", cfg.is_alpha)?;
        cfg.is_theta = doc.f64_or("is_theta", cfg.is_theta)?;
        cfg.moment_sample = doc.usize_or("moment_sample", cfg.moment_sample)?;
        if let Some(out) = doc.get_str("out") {
            cfg.out = PathBuf::from(out);
        }
        if doc.keys().any(|k| k.starts_with("target.")) {
            let mut target = doc.clone();
            if !target.contains("target.kind") {
                target.set("target.kind", "cgmy");
            }
            match TargetSpec::from_kv(&target, "target.")? {
                TargetSpec::Cgmy { params, strike } => {
                    let r = params.damping();
                    if r.iter().any(|&x| x != r[0]) {
                        return Err(ExperimentError::Config(
                            "target.damping must be a single value; it is repeated in every dimension".into(),
                        ));
                    }
                    cfg.cgmy = params.with_damping(vec![r[0]]).map_err(|e| ExperimentError::Config(e.to_string()))?;
                    cfg.strike = strike;
                }
                other => {
                    return Err(ExperimentError::Config(format!(
                        "target.kind = {} is not configurable here; only cgmy parameters are read",
                        other.kind()
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0 || d > 64) {
            return bad(format!("d must list dimensions in 1..=64, got {:?}", self.dims));
        }
        if self.gold_samples < self.replicates.max(2) {
            return bad(format!("gold_samples must be at least max(replicates, 2), got {}", self.gold_samples));
        }
        match self.kind {
            ExperimentKind::McComparison | ExperimentKind::Diagnostics => {
                if self.alphas.is_empty() || self.alphas.iter().any(|&a| !(a > 0.0 && a <= 2.0)) {
                    return bad(format!("alpha grid must be non-empty and inside (0, 2], got {:?}", self.alphas));
                }
            }
            ExperimentKind::McmcCauchy => {
                if self.alphas != [1.0] {
                    return bad(format!("mcmc-cauchy needs alpha = 1, got {:?}", self.alphas));
                }
            }
            ExperimentKind::CgmyPricing => {
                if self.cgmy.damping()[0] >= 0.0 {
                    return bad("the put transform needs damping R < 0".into());
                }
                if !(self.is_alpha > 0.0 && self.is_alpha <= 2.0) || !(self.is_theta > 0.0) {
                    return bad(format!("IS proposal needs 0 < is_alpha <= 2 and is_theta > 0, got {}, {}", self.is_alpha, self.is_theta));
                }
            }
        }
        if !(self.diag_step > 0.0) {
            return bad(format!("diag_step must be positive, got {}", self.diag_step));
        }
        for a in &self.algorithms {
            if !ALGORITHMS.contains(&a.as_str()) {
                return bad(format!("unknown algorithm `{a}` (expected mala, mhrw or mhis)"));
            }
        }
        for (name, grid) in [("tune.mhrw", &self.mhrw_grid), ("tune.mhis", &self.mhis_grid), ("tune.mala", &self.mala_grid)] {
            if grid.is_empty() || grid.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
                return bad(format!("{name} must be a non-empty list of positive numbers"));
            }
        }
        Ok(())
    }

    /// `diag(step, 2·step, …, d·step)`.
    pub fn diagonal(&self, d: usize) -> Vec<f64> {
        (1..=d).map(|k| k as f64 * self.diag_step).collect()
    }

    pub fn grid(&self, algorithm: &str) -> &[f64] {
        match algorithm {
            "mala" => &self.mala_grid,
            "mhis" => &self.mhis_grid,
            _ => &self.mhrw_grid,
        }
    }

    /// The effective configuration, as written next to the outputs.
    pub fn to_kv(&self) -> KvDocument {
        let mut doc = KvDocument::default();
        doc.set("experiment", self.kind.as_str());
        doc.set("d", self.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","));
        if !self.alphas.is_empty() {
            doc.set("alpha", fmt_f64_list(&self.alphas));
        }
        doc.set("replicates", self.replicates.to_string());
        doc.set("n", self.n.to_string());
        doc.set("burn_in", self.burn_in.to_string());
        doc.set("seed", self.seed.to_string());
        doc.set("gold_samples", self.gold_samples.to_string());
        doc.set("algorithms", self.algorithms.join(","));
        doc.set("tune.mhrw", fmt_f64_list(&self.mhrw_grid));
        doc.set("tune.mhis", fmt_f64_list(&self.mhis_grid));
        doc.set("tune.mala", fmt_f64_list(&self.mala_grid));
        doc.set("diag_step", fmt_f64(self.diag_step));
        doc.set("random_rotation", self.random_rotation.to_string());
        doc.set("moment_sample", self.moment_sample.to_string());
        doc.set("paper_scale", self.paper_scale.to_string());
        if self.kind == ExperimentKind::CgmyPricing {
            let p = &self.cgmy;
            for (k, v) in [("c", p.c), ("g", p.g), ("m", p.m), ("y", p.y), ("r", p.r), ("t", p.t), ("s0", p.s0)] {
                doc.set(format!("target.{k}"), fmt_f64(v));
            }
            doc.set("target.kind", "cgmy");
            doc.set("target.damping", fmt_f64(p.damping()[0]));
            doc.set("target.strike", fmt_f64(self.strike));
            doc.set("is_alpha", fmt_f64(self.is_alpha));
            doc.set("is_theta", fmt_f64(self.is_theta));
        }
        doc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = ExperimentConfig::parse("experiment = mcmc-cauchy\nreplicates = 3\nd = 2, 3\n", None).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::McmcCauchy);
        assert_eq!(cfg.replicates, 3);
        assert_eq!(cfg.dims, vec![2, 3]);
        assert_eq!(cfg.n, 20_000);
        assert_eq!(cfg.burn_in, 5000);
        assert_eq!(cfg.diagonal(3), vec![0.2, 0.4, 0.6000000000000001]);
    }

    #[test]
    fn paper_scale() {
        let cfg = ExperimentConfig::parse("paper_scale = true", Some(ExperimentKind::McComparison)).unwrap();
        assert_eq!((cfg.replicates, cfg.n, cfg.burn_in), (100, 100_000, 5000));
        let cfg = ExperimentConfig::parse("paper_scale = true", Some(ExperimentKind::CgmyPricing)).unwrap();
        assert_eq!(cfg.n, 10_000);
    }

    #[test]
    fn rejects_bad_configs() {
        let k = Some(ExperimentKind::McComparison);
        for text in [
            "replicates = 0",
            "alpha = 2.5",
            "algorithms = gibbs",
            "tune.mhrw = 1, -1",
            "experiment = cgmy-pricing",
            "n = lots",
        ] {
            assert!(matches!(ExperimentConfig::parse(text, k), Err(ExperimentError::Config(_))), "{text}");
        }
        let strip = ExperimentConfig::parse("target.damping = -6", Some(ExperimentKind::CgmyPricing));
        assert!(matches!(strip, Err(ExperimentError::Config(_))));
        assert!(ExperimentConfig::parse("d = 2", None).is_err());
    }

    #[test]
    fn cgmy_target_keys() {
        let cfg = ExperimentConfig::parse("target.s0 = 90\ntarget.strike = 95\nd = 1", Some(ExperimentKind::CgmyPricing)).unwrap();
        assert_eq!(cfg.cgmy.s0, 90.0);
        assert_eq!(cfg.strike, 95.0);
        assert_eq!(cfg.cgmy.damping(), &[-1.5]);
    }

    #[test]
    fn round_trip() {
        for kind in ExperimentKind::ALL {
            let cfg = ExperimentConfig::defaults(kind);
            let text = cfg.to_kv().render();
            let back = ExperimentConfig::parse(&text, None).unwrap();
            assert_eq!(back.to_kv().render(), text);
            assert_eq!(ExperimentKind::parse(kind.subcommand()), Some(kind));
        }
    }
}
