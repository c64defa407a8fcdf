use std::fmt::Write as _;

use super::SamplerError;
use crate::kv::fmt_f64;

/// How effective steps are weighted by downstream estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// Every effective sample has weight 1/n.
    Uniform,
    /// Sample `X_k` has weight `γ_k / Γ_{N,n}`.
    StepSize,
}

impl WeightScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::StepSize => "step-proportional",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(WeightScheme::Uniform),
            "step-proportional" => Some(WeightScheme::StepSize),
            _ => None,
        }
    }
}

/// States `X_0, …, X_{N+n}` of one chain plus per-step bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChainTrace {
    dim: usize,
    states: Vec<f64>,
    accepted: Vec<bool>,
    burn_in: usize,
    effective: usize,
    step_weights: Vec<f64>,
    scheme: WeightScheme,
    warnings: Vec<String>,
}

impl MarkovChainTrace {
    pub(crate) fn with_capacity(dim: usize, x0: &[f64], burn_in: usize, effective: usize, scheme: WeightScheme) -> Self {
        let total = burn_in + effective;
        let mut states = Vec::with_capacity(dim * (total + 1));
        states.extend_from_slice(x0);
        MarkovChainTrace {
            dim,
            states,
            accepted: Vec::with_capacity(total),
            burn_in,
            effective,
            step_weights: Vec::with_capacity(effective),
            scheme,
            warnings: Vec::new(),
        }
    }

    /// Appends `X_{k+1}`; `weight` is only kept once past the burn-in.
    pub(crate) fn push(&mut self, state: &[f64], accepted: bool, weight: f64) {
        self.states.extend_from_slice(state);
        self.accepted.push(accepted);
        if self.accepted.len() > self.burn_in {
            self.step_weights.push(weight);
        }
    }

    pub(crate) fn warn(&mut self, msg: String) {
        self.warnings.push(msg);
    }

    /// Builds a trace from raw parts, checking length consistency.
    pub fn from_parts(
        dim: usize,
        states: Vec<f64>,
        accepted: Vec<bool>,
        burn_in: usize,
        step_weights: Vec<f64>,
        scheme: WeightScheme,
    ) -> Result<Self, SamplerError> {
        let total = accepted.len();
        if dim == 0 || total < burn_in {
            return Err(SamplerError::Dump(format!("bad lengths: d={dim}, steps={total}, N={burn_in}")));
        }
        let effective = total - burn_in;
        if states.len() != dim * (total + 1) || step_weights.len() != effective {
            return Err(SamplerError::Dump(format!(
                "expected {} states and {effective} weights, got {} values and {} weights",
                total + 1,
                states.len(),
                step_weights.len()
            )));
        }
        Ok(MarkovChainTrace {
            dim,
            states,
            accepted,
            burn_in,
            effective,
            step_weights,
            scheme,
            warnings: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn effective(&self) -> usize {
        self.effective
    }

    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `X_k` for `k` in `0..=N+n`.
    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dim)
    }

    /// `X_{N+1}, …, X_{N+n}`.
    pub fn effective_states(&self) -> impl Iterator<Item = &[f64]> {
        self.states[(self.burn_in + 1) * self.dim..].chunks_exact(self.dim)
    }

    pub fn accepted(&self) -> &[bool] {
        &self.accepted
    }

    pub fn step_weights(&self) -> &[f64] {
        &self.step_weights
    }

    pub fn weight_scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Fraction of accepted steps among the effective ones.
    pub fn acceptance_rate(&self) -> Result<f64, SamplerError> {
        if self.effective == 0 {
            return Err(SamplerError::EmptyWindow);
        }
        let acc = self.accepted[self.burn_in..].iter().filter(|a| **a).count();
        Ok(acc as f64 / self.effective as f64)
    }

    /// Text dump: header, then one state per line with flag and weight.
    /// `X_0` and burn-in states carry weight 0.
    pub fn dump(&self, seed: u64) -> String {
        let mut out = format!(
            "# d={} N={} n={} seed={}\n",
            self.dim, self.burn_in, self.effective, seed
        );
        for (k, x) in self.states().enumerate() {
            for v in x {
                out.push_str(&fmt_f64(*v));
                out.push('\t');
            }
            let (flag, w) = if k == 0 {
                (false, 0.0)
            } else if k <= self.burn_in {
                (self.accepted[k - 1], 0.0)
            } else {
                (self.accepted[k - 1], self.step_weights[k - 1 - self.burn_in])
            };
            let _ = writeln!(out, "{}\t{}", u8::from(flag), fmt_f64(w));
        }
        out
    }
}

/// A parsed trace dump.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceDump {
    pub seed: u64,
    pub trace: MarkovChainTrace,
}

impl TraceDump {
    pub fn parse(text: &str, scheme: WeightScheme) -> Result<Self, SamplerError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|h| h.strip_prefix('#'))
            .ok_or_else(|| SamplerError::Dump("missing header".into()))?;
        let mut fields = [None; 4];
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| SamplerError::Dump(format!("bad header token {tok:?}")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| SamplerError::Dump(format!("bad header value {tok:?}")))?;
            let slot = match k {
                "d" => 0,
                "N" => 1,
                "n" => 2,
                "seed" => 3,
                _ => return Err(SamplerError::Dump(format!("unknown header key {k:?}"))),
            };
            fields[slot] = Some(v);
        }
        let [Some(d), Some(burn_in), Some(n), Some(seed)] = fields else {
            return Err(SamplerError::Dump("incomplete header".into()));
        };
        let (d, burn_in, n) = (d as usize, burn_in as usize, n as usize);
        let mut states = Vec::new();
        let mut accepted = Vec::new();
        let mut weights = Vec::new();
        for (k, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != d + 2 {
                return Err(SamplerError::Dump(format!("line {}: expected {} columns", k + 2, d + 2)));
            }
            for c in &cols[..d] {
                states.push(parse_f64(c)?);
            }
            let flag = match cols[d] {
                "0" => false,
                "1" => true,
                other => return Err(SamplerError::Dump(format!("bad flag {other:?}"))),
            };
            let w = parse_f64(cols[d + 1])?;
            if k > 0 {
                accepted.push(flag);
                if k > burn_in {
                    weights.push(w);
                }
            }
        }
        if accepted.len() != burn_in + n {
            return Err(SamplerError::Dump(format!(
                "header promises {} steps, found {}",
                burn_in + n,
                accepted.len()
            )));
        }
        let trace = MarkovChainTrace::from_parts(d, states, accepted, burn_in, weights, scheme)?;
        Ok(TraceDump { seed, trace })
    }
}

fn parse_f64(s: &str) -> Result<f64, SamplerError> {
    s.trim()
        .parse()
        .map_err(|_| SamplerError::Dump(format!("bad number {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_with_flags(flags: &[bool]) -> MarkovChainTrace {
        let mut t = MarkovChainTrace::with_capacity(1, &[0.0], 0, flags.len(), WeightScheme::Uniform);
        for (k, f) in flags.iter().enumerate() {
            t.push(&[k as f64], *f, 1.0);
        }
        t
    }

    #[test]
    fn acceptance_rate_cases() {
        assert_eq!(trace_with_flags(&[true; 4]).acceptance_rate().unwrap(), 1.0);
        assert_eq!(trace_with_flags(&[false; 4]).acceptance_rate().unwrap(), 0.0);
        assert_eq!(trace_with_flags(&[true, false, true, false]).acceptance_rate().unwrap(), 0.5);
        assert_eq!(trace_with_flags(&[]).acceptance_rate(), Err(SamplerError::EmptyWindow));
    }

    #[test]
    fn dump_round_trip() {
        let mut t = MarkovChainTrace::with_capacity(2, &[0.1, -0.2], 1, 2, WeightScheme::StepSize);
        t.push(&[1.0 / 3.0, 2.0], true, 0.5);
        t.push(&[1.0 / 3.0, 2.0], false, 0.25);
        t.push(&[1e-300, -7.0], true, 0.125);
        let text = t.dump(42);
        assert!(text.starts_with("# d=2 N=1 n=2 seed=42\n"));
        let back = TraceDump::parse(&text, WeightScheme::StepSize).unwrap();
        assert_eq!(back.seed, 42);
        assert_eq!(back.trace, t);
        assert_eq!(back.trace.step_weights(), &[0.25, 0.125]);
    }

    #[test]
    fn dump_rejects_truncation() {
        let t = trace_with_flags(&[true, false]);
        let text = t.dump(1);
        let cut: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(TraceDump::parse(&cut, WeightScheme::Uniform).is_err());
    }
}
