//! Exponential-rate fits of synchronization error series.

use crate::util::linear_fit;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecayFitError {
    #[error("need at least 10 points above the floor, got {0}")]
    TooFewPoints(usize),
    #[error("already synchronized: every point is at or below the floor")]
    AlreadySynchronized,
}

/// Fitted exponential rate `e(t) ~ C exp(-lambda t)` over an automatically
/// selected window.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub lambda: f64,
    pub residual: f64,
    pub window: (f64, f64),
    pub floor: f64,
    pub points_used: usize,
}

/// Least squares on `log e(t)`. Points at or below `floor` are excluded; the
/// fit window starts after the initial transient, chosen as the suffix with
/// the smallest per-point residual among candidate starts.
pub fn fit_decay(series: &[(f64, f64)], floor: f64) -> Result<DecayFit, DecayFitError> {
    let usable: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, e)| *e > floor)
        .map(|&(t, e)| (t, e.ln()))
        .collect();
    if usable.is_empty() {
        return Err(DecayFitError::AlreadySynchronized);
    }
    if usable.len() < 10 {
        return Err(DecayFitError::TooFewPoints(usable.len()));
    }
    let n = usable.len();
    // candidate window starts over the leading 60%, keeping at least 10 points
    let max_start = (n * 3 / 5).min(n - 10);
    let mut best: Option<(f64, f64, usize)> = None; // (residual, slope, start)
    for s in 0..=max_start {
        let ts: Vec<f64> = usable[s..].iter().map(|p| p.0).collect();
        let ls: Vec<f64> = usable[s..].iter().map(|p| p.1).collect();
        let (_, slope, res) = linear_fit(&ts, &ls);
        if best.as_ref().is_none_or(|(r, _, _)| res < *r) {
            best = Some((res, slope, s));
        }
    }
    let (residual, slope, start) = best.unwrap();
    Ok(DecayFit {
        lambda: -slope,
        residual,
        window: (usable[start].0, usable[n - 1].0),
        floor,
        points_used: n - start,
    })
}
