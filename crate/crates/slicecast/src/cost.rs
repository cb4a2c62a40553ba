//! Asymmetric subscription cost and classic forecast-accuracy metrics.
//!
//! A slice tenant pays for every bit it reserves but does not use
//! (undersubscription) and pays a much steeper penalty for every bit it
//! uses beyond its reservation (oversubscription), because the second
//! case degrades service for the slice's own traffic. For a reserved
//! rate `gbr_t` and an actual rate `a_t`, each sample contributes
//!
//! ```text
//! f_u(t) * (gbr_t - a_t) * p_u  +  f_o(t) * (a_t - gbr_t) * p_o
//! ```
//!
//! where `f_u(t) = 1` iff `gbr_t > a_t`, `f_o(t) = 1` iff `a_t > gbr_t`,
//! and both flags are zero when the reservation is exact. The default
//! penalties (`p_u = 0.1`, `p_o = 30`) make one oversubscribed bit as
//! expensive as three hundred idle reserved bits, which is what pushes
//! predictors toward cautious over-reservation.
//!
//! All accumulations are compensated, so a single pass over a day-long
//! ledger matches a batch recomputation to well below 1e-9 relative.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::KahanSum;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("metric series is empty")]
    EmptySeries,
    #[error("metric series needs at least two samples, got {0}")]
    TooShort(usize),
    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },
    #[error("penalty weights must be finite and non-negative")]
    InvalidParams,
    #[error("static reservation must be finite and positive, got {0}")]
    NonPositiveStatic(f64),
}

/// Penalty weights per bit of under- and oversubscription.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Cost per reserved-but-unused bit.
    #[serde(default = "default_p_u")]
    pub p_u: f64,
    /// Cost per bit used beyond the reservation.
    #[serde(default = "default_p_o")]
    pub p_o: f64,
}

fn default_p_u() -> f64 {
    0.1
}

fn default_p_o() -> f64 {
    30.0
}

impl Default for CostParams {
    fn default() -> Self {
        Self { p_u: default_p_u(), p_o: default_p_o() }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), CostError> {
        if self.p_u.is_finite() && self.p_o.is_finite() && self.p_u >= 0.0 && self.p_o >= 0.0 {
            Ok(())
        } else {
            Err(CostError::InvalidParams)
        }
    }
}

/// Per-series subscription accounting over equal-length actual/reserved rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubscriptionMetrics {
    /// Sum of `a_t - gbr_t` over oversubscribed samples.
    pub over_magnitude: f64,
    pub over_count: u64,
    pub over_fraction: f64,
    /// Sum of `gbr_t - a_t` over undersubscribed samples.
    pub under_magnitude: f64,
    pub under_count: u64,
    pub under_fraction: f64,
    /// `p_u * under_magnitude + p_o * over_magnitude`.
    pub total_cost: f64,
    /// Sum of reserved rates.
    pub reserved_total: f64,
    /// Sum of actual rates.
    pub actual_total: f64,
}

/// Textbook forecast-accuracy metrics for comparing reservation series
/// against the demand they tried to track.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicMetrics {
    pub mae: f64,
    pub mse: f64,
    /// Always `mse.sqrt()`.
    pub rmse: f64,
    /// Mean of `|a_t - f_t| / a_t`; samples with `a_t == 0` are skipped
    /// and the divisor shrinks accordingly. Zero when nothing survives.
    pub mape: f64,
    /// Mean directional accuracy: fraction of steps where the forecast
    /// moved to the same side of the previous actual as the actual did
    /// (zero movement only matches zero movement).
    pub mda: f64,
}

/// Classifies one sample as (undersubscribed, oversubscribed).
///
/// Exactly one flag is set when `actual != gbr`; neither is set on an
/// exact reservation, so the pair is never `(true, true)`.
pub fn subscription_flags(actual: f64, gbr: f64) -> Result<(bool, bool), CostError> {
    if !actual.is_finite() {
        return Err(CostError::NonFinite { index: 0 });
    }
    if !gbr.is_finite() {
        return Err(CostError::NonFinite { index: 0 });
    }
    Ok((gbr > actual, actual > gbr))
}

fn check_pair(actual: &[f64], gbr: &[f64]) -> Result<(), CostError> {
    if actual.len() != gbr.len() {
        return Err(CostError::LengthMismatch { left: actual.len(), right: gbr.len() });
    }
    if actual.is_empty() {
        return Err(CostError::EmptySeries);
    }
    for (index, (&a, &g)) in actual.iter().zip(gbr).enumerate() {
        if !a.is_finite() || !g.is_finite() {
            return Err(CostError::NonFinite { index });
        }
    }
    Ok(())
}

/// Total subscription cost of a reservation series against actual demand.
///
/// Streaming equivalent of summing the per-sample cost expression; zero
/// iff every reservation is exact.
pub fn total_cost(actual: &[f64], gbr: &[f64], params: &CostParams) -> Result<f64, CostError> {
    params.validate()?;
    check_pair(actual, gbr)?;
    let mut acc = KahanSum::new();
    for (&a, &g) in actual.iter().zip(gbr) {
        if g > a {
            acc.add((g - a) * params.p_u);
        } else if a > g {
            acc.add((a - g) * params.p_o);
        }
    }
    Ok(acc.value())
}

/// Single-pass subscription accounting for a reservation series.
pub fn subscription_metrics(
    actual: &[f64],
    gbr: &[f64],
    params: &CostParams,
) -> Result<SubscriptionMetrics, CostError> {
    params.validate()?;
    check_pair(actual, gbr)?;
    let mut over = KahanSum::new();
    let mut under = KahanSum::new();
    let mut reserved = KahanSum::new();
    let mut used = KahanSum::new();
    let mut over_count = 0u64;
    let mut under_count = 0u64;
    for (&a, &g) in actual.iter().zip(gbr) {
        if a > g {
            over.add(a - g);
            over_count += 1;
        } else if g > a {
            under.add(g - a);
            under_count += 1;
        }
        reserved.add(g);
        used.add(a);
    }
    let n = actual.len() as f64;
    let over_magnitude = over.value();
    let under_magnitude = under.value();
    Ok(SubscriptionMetrics {
        over_magnitude,
        over_count,
        over_fraction: over_count as f64 / n,
        under_magnitude,
        under_count,
        under_fraction: under_count as f64 / n,
        total_cost: params.p_u * under_magnitude + params.p_o * over_magnitude,
        reserved_total: reserved.value(),
        actual_total: used.value(),
    })
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Forecast-accuracy metrics over equal-length actual/forecast series of
/// at least two samples.
pub fn classic_metrics(actual: &[f64], forecast: &[f64]) -> Result<ClassicMetrics, CostError> {
    if actual.len() != forecast.len() {
        return Err(CostError::LengthMismatch { left: actual.len(), right: forecast.len() });
    }
    if actual.len() < 2 {
        return Err(CostError::TooShort(actual.len()));
    }
    check_pair(actual, forecast)?;

    let mut abs_err = KahanSum::new();
    let mut sq_err = KahanSum::new();
    let mut pct_err = KahanSum::new();
    let mut pct_terms = 0u64;
    for (&a, &f) in actual.iter().zip(forecast) {
        let e = a - f;
        abs_err.add(e.abs());
        sq_err.add(e * e);
        if a != 0.0 {
            pct_err.add((e / a).abs());
            pct_terms += 1;
        }
    }

    let mut direction_hits = 0u64;
    for t in 1..actual.len() {
        if sign(actual[t] - actual[t - 1]) == sign(forecast[t] - actual[t - 1]) {
            direction_hits += 1;
        }
    }

    let n = actual.len() as f64;
    let mse = sq_err.value() / n;
    Ok(ClassicMetrics {
        mae: abs_err.value() / n,
        mse,
        rmse: mse.sqrt(),
        mape: if pct_terms == 0 { 0.0 } else { pct_err.value() / pct_terms as f64 },
        mda: direction_hits as f64 / (n - 1.0),
    })
}

/// Fraction of a static worst-case reservation that a reservation series
/// avoided: `1 - sum(gbr) / (n * static_gbr)`.
///
/// Zero when the series is the static reservation itself; negative when
/// the series reserved more than worst case.
pub fn bandwidth_savings(gbr: &[f64], static_gbr: f64) -> Result<f64, CostError> {
    if !(static_gbr.is_finite() && static_gbr > 0.0) {
        return Err(CostError::NonPositiveStatic(static_gbr));
    }
    if gbr.is_empty() {
        return Err(CostError::EmptySeries);
    }
    let mut acc = KahanSum::new();
    for (index, &g) in gbr.iter().enumerate() {
        if !g.is_finite() {
            return Err(CostError::NonFinite { index });
        }
        acc.add(g);
    }
    Ok(1.0 - acc.value() / (gbr.len() as f64 * static_gbr))
}
