use crate::diagnostics::Domain;

/// One grid point of a tuning search.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningRow {
    pub d: usize,
    pub params: String,
    pub method: String,
    pub domain: Domain,
    /// `scale` for random-walk and independence proposals, `gamma` for MALA.
    pub parameter: String,
    pub value: f64,
    /// Mean squared deviation from the gold estimate over the tuning
    /// trajectories; infinite when any trajectory failed.
    pub mse: f64,
    pub chosen: bool,
}

/// Index of the smallest finite value, first one on ties.
pub fn grid_argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

pub(crate) fn mse(estimates: &[f64], gold: f64) -> f64 {
    estimates.iter().map(|e| (e - gold).powi(2)).sum::<f64>() / estimates.len() as f64
}
