//! Per-stream GBR prediction from interval history.
//!
//! Time is split into fixed reconfiguration intervals. A predictor holds
//! the request it issued for the interval now running; when that
//! interval's samples arrive via [`Predictor::observe_interval`], the
//! pairing of issued request and observed demand is appended to history
//! and the request for the next interval is computed:
//!
//! * `max`: the highest rate seen in the previous interval.
//! * `modified_max`: the `max` baseline, nudged by how the last
//!   `window_t` intervals deviated from what was requested for them. If
//!   any sample exceeded its interval's request, the baseline is raised
//!   by the mean excess (demand is outgrowing the reservation);
//!   otherwise it is lowered by the mean shortfall. Any overshoot in the
//!   window therefore pushes the next request up, which is what keeps
//!   the expensive oversubscription events rare.
//! * Baselines: whole-trace worst case, moving average, EWMA, and
//!   least-squares extrapolation, all over per-interval maxima.
//!
//! Predictions are clamped to `[0, capacity_cap]` and never depend on
//! anything but config and observed history, so replaying a trace
//! reproduces the request series exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trace::BandwidthTrace;

#[derive(Debug, Error, PartialEq)]
pub enum PredictorError {
    #[error("invalid predictor config: {0}")]
    InvalidConfig(String),
    #[error("initial_gbr is required when no trace is supplied at construction")]
    MissingInitialGbr,
    #[error("technique {0} needs whole-trace stats; construct with for_trace")]
    MissingTraceContext(Technique),
    #[error("interval carried no samples")]
    EmptyInterval,
    #[error("non-finite sample at index {0}")]
    InvalidSample(usize),
}

/// Request-sizing technique. Serialized names are the lowercase strings
/// used in configs, reports, and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    StaticWorstCase,
    Max,
    ModifiedMax,
    MovingAverage,
    Ewma,
    Linreg,
}

impl Technique {
    pub const ALL: [Technique; 6] = [
        Technique::StaticWorstCase,
        Technique::Max,
        Technique::ModifiedMax,
        Technique::MovingAverage,
        Technique::Ewma,
        Technique::Linreg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technique::StaticWorstCase => "static_worst_case",
            Technique::Max => "max",
            Technique::ModifiedMax => "modified_max",
            Technique::MovingAverage => "moving_average",
            Technique::Ewma => "ewma",
            Technique::Linreg => "linreg",
        }
    }

    /// True for the techniques served by [`Predictor::predict_next_baseline`].
    pub fn is_baseline(self) -> bool {
        !matches!(self, Technique::Max | Technique::ModifiedMax)
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Technique::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown technique \"{s}\" (expected one of: static_worst_case, max, modified_max, moving_average, ewma, linreg)"))
    }
}

/// Predictor tuning. Serialized as a flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictorConfig {
    pub technique: Technique,
    /// Modified-Max deviation lookback, in intervals.
    #[serde(default = "default_window_t")]
    pub window_t: usize,
    /// Lookback for the moving-average and linear-regression baselines.
    #[serde(default = "default_ma_window")]
    pub ma_window: usize,
    /// Weight on the newest interval maximum, in (0, 1].
    #[serde(default = "default_ewma_alpha")]
    pub ewma_alpha: f64,
    /// First-interval request. When absent, a trace-aware constructor
    /// primes it with twice the trace's first sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_gbr: Option<f64>,
    /// Upper clamp on every prediction, e.g. a per-stream license limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_cap: Option<f64>,
}

fn default_window_t() -> usize {
    3
}
fn default_ma_window() -> usize {
    3
}
fn default_ewma_alpha() -> f64 {
    0.3
}

impl PredictorConfig {
    pub fn new(technique: Technique) -> Self {
        Self {
            technique,
            window_t: default_window_t(),
            ma_window: default_ma_window(),
            ewma_alpha: default_ewma_alpha(),
            initial_gbr: None,
            capacity_cap: None,
        }
    }

    pub fn validate(&self) -> Result<(), PredictorError> {
        if self.window_t == 0 {
            return Err(PredictorError::InvalidConfig("window_t must be >= 1".into()));
        }
        if self.ma_window == 0 {
            return Err(PredictorError::InvalidConfig("ma_window must be >= 1".into()));
        }
        if !(self.ewma_alpha > 0.0 && self.ewma_alpha <= 1.0) {
            return Err(PredictorError::InvalidConfig(format!(
                "ewma_alpha must be in (0, 1], got {}",
                self.ewma_alpha
            )));
        }
        if let Some(g) = self.initial_gbr {
            if !g.is_finite() || g < 0.0 {
                return Err(PredictorError::InvalidConfig(format!(
                    "initial_gbr must be finite and >= 0, got {g}"
                )));
            }
        }
        if let Some(c) = self.capacity_cap {
            if !c.is_finite() || c < 0.0 {
                return Err(PredictorError::InvalidConfig(format!(
                    "capacity_cap must be finite and >= 0, got {c}"
                )));
            }
        }
        Ok(())
    }
}

/// One completed interval: the request that was in force and the demand
/// samples observed under it.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalObservation {
    pub interval_index: u64,
    pub predicted_gbr: f64,
    pub samples: Vec<f64>,
}

impl IntervalObservation {
    fn max_sample(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One issued request, as recorded in simulation results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub stream_id: String,
    pub interval_index: u64,
    pub requested_gbr: f64,
    pub technique: Technique,
}

/// Stateful per-stream predictor.
#[derive(Debug, Clone)]
pub struct Predictor {
    config: PredictorConfig,
    initial_gbr: f64,
    static_gbr: Option<f64>,
    history: Vec<IntervalObservation>,
    ewma: Option<f64>,
    observed: u64,
    in_force_gbr: f64,
}

impl Predictor {
    /// Builds a predictor from config alone. `initial_gbr` must be set,
    /// and `static_worst_case` is rejected because it needs whole-trace
    /// stats; use [`Predictor::for_trace`] for both.
    pub fn new(config: PredictorConfig) -> Result<Self, PredictorError> {
        config.validate()?;
        if config.technique == Technique::StaticWorstCase {
            return Err(PredictorError::MissingTraceContext(config.technique));
        }
        let initial = config.initial_gbr.ok_or(PredictorError::MissingInitialGbr)?;
        Ok(Self::build(config, initial, None))
    }

    /// Builds a predictor for replaying a known trace: primes the
    /// first-interval request with twice the trace's first sample when
    /// the config leaves it unset, and records the whole-trace maximum
    /// for the static worst-case technique.
    pub fn for_trace(config: PredictorConfig, trace: &BandwidthTrace) -> Result<Self, PredictorError> {
        config.validate()?;
        let static_gbr = trace.stats().max_bps;
        // The worst-case technique has no cold start: it reserves the
        // trace peak from the first interval onward.
        let initial = if config.technique == Technique::StaticWorstCase {
            static_gbr
        } else {
            config.initial_gbr.unwrap_or_else(|| 2.0 * trace.samples()[0].bitrate_bps)
        };
        Ok(Self::build(config, initial, Some(static_gbr)))
    }

    fn build(config: PredictorConfig, initial_gbr: f64, static_gbr: Option<f64>) -> Self {
        let mut p = Self {
            config,
            initial_gbr,
            static_gbr,
            history: Vec::new(),
            ewma: None,
            observed: 0,
            in_force_gbr: 0.0,
        };
        p.in_force_gbr = p.clamp(initial_gbr);
        p
    }

    pub fn config(&self) -> &PredictorConfig {
        &self.config
    }

    /// The request currently in force: the initial request before any
    /// history, then whatever the last observation predicted.
    pub fn current_request(&self) -> f64 {
        self.in_force_gbr
    }

    /// Completed intervals, oldest first. Only the lookback the
    /// technique needs is retained.
    pub fn history(&self) -> &[IntervalObservation] {
        &self.history
    }

    pub fn intervals_observed(&self) -> u64 {
        self.observed
    }

    /// Records one completed interval's demand samples, pairing them
    /// with the request that was in force, then rolls the in-force
    /// request forward to the prediction for the next interval.
    pub fn observe_interval(&mut self, samples: &[f64]) -> Result<(), PredictorError> {
        if samples.is_empty() {
            return Err(PredictorError::EmptyInterval);
        }
        if let Some(bad) = samples.iter().position(|s| !s.is_finite()) {
            return Err(PredictorError::InvalidSample(bad));
        }

        self.history.push(IntervalObservation {
            interval_index: self.observed,
            predicted_gbr: self.in_force_gbr,
            samples: samples.to_vec(),
        });
        self.observed += 1;

        let keep = match self.config.technique {
            Technique::MovingAverage | Technique::Linreg => self.config.ma_window,
            _ => self.config.window_t,
        };
        while self.history.len() > keep {
            self.history.remove(0);
        }

        let newest_max = self.history.last().unwrap().max_sample();
        self.ewma = Some(match self.ewma {
            None => newest_max,
            Some(e) => self.config.ewma_alpha * newest_max + (1.0 - self.config.ewma_alpha) * e,
        });

        self.in_force_gbr = self.predict_next();
        Ok(())
    }

    /// Prediction for the next interval under the configured technique.
    pub fn predict_next(&self) -> f64 {
        match self.config.technique {
            Technique::Max => self.predict_next_max(),
            Technique::ModifiedMax => self.predict_next_modified_max(),
            _ => self.predict_next_baseline(),
        }
    }

    /// Highest rate observed in the most recent interval.
    pub fn predict_next_max(&self) -> f64 {
        match self.history.last() {
            Some(last) => self.clamp(last.max_sample()),
            None => self.clamp(self.initial_gbr),
        }
    }

    /// The `max` baseline shifted by the mean deviation between demand
    /// and request over the last `window_t` intervals: up by the mean
    /// excess of samples that overran their interval's request if any
    /// did, otherwise down by the mean shortfall of those that stayed
    /// under it.
    pub fn predict_next_modified_max(&self) -> f64 {
        let Some(last) = self.history.last() else {
            return self.clamp(self.initial_gbr);
        };
        let window_len = self.config.window_t.min(self.history.len());
        let window = &self.history[self.history.len() - window_len..];

        let mut over_sum = 0.0;
        let mut over_count = 0u64;
        let mut under_sum = 0.0;
        let mut under_count = 0u64;
        for interval in window {
            for &s in &interval.samples {
                if s > interval.predicted_gbr {
                    over_sum += s - interval.predicted_gbr;
                    over_count += 1;
                } else if s < interval.predicted_gbr {
                    under_sum += interval.predicted_gbr - s;
                    under_count += 1;
                }
            }
        }

        let baseline = last.max_sample();
        let prediction = if over_count > 0 {
            baseline + over_sum / over_count as f64
        } else if under_count > 0 {
            baseline - under_sum / under_count as f64
        } else {
            baseline
        };
        self.clamp(prediction)
    }

    /// Prediction under the configured baseline technique. Falls back to
    /// the initial request until enough history exists (one interval for
    /// the averages, two points for the regression).
    ///
    /// Callers must configure a baseline technique; see
    /// [`Technique::is_baseline`].
    pub fn predict_next_baseline(&self) -> f64 {
        assert!(
            self.config.technique.is_baseline(),
            "predict_next_baseline called with technique {}",
            self.config.technique
        );
        let raw = match self.config.technique {
            Technique::StaticWorstCase => {
                // Enforced at construction: static predictors are built for a trace.
                self.static_gbr.expect("static technique constructed without trace stats")
            }
            Technique::MovingAverage => match self.window_maxima(self.config.ma_window) {
                maxima if maxima.is_empty() => self.initial_gbr,
                maxima => maxima.iter().sum::<f64>() / maxima.len() as f64,
            },
            Technique::Ewma => self.ewma.unwrap_or(self.initial_gbr),
            Technique::Linreg => self.linreg_extrapolation(),
            Technique::Max | Technique::ModifiedMax => unreachable!(),
        };
        self.clamp(raw)
    }

    fn window_maxima(&self, lookback: usize) -> Vec<f64> {
        let len = lookback.min(self.history.len());
        self.history[self.history.len() - len..].iter().map(|o| o.max_sample()).collect()
    }

    /// Ordinary least squares over the last `ma_window` interval maxima
    /// against their interval indices, evaluated at the next index and
    /// floored at zero.
    fn linreg_extrapolation(&self) -> f64 {
        let len = self.config.ma_window.min(self.history.len());
        if len < 2 {
            return self.initial_gbr;
        }
        let window = &self.history[self.history.len() - len..];
        let n = len as f64;
        let x_mean = window.iter().map(|o| o.interval_index as f64).sum::<f64>() / n;
        let y_mean = window.iter().map(|o| o.max_sample()).sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for o in window {
            let dx = o.interval_index as f64 - x_mean;
            sxx += dx * dx;
            sxy += dx * (o.max_sample() - y_mean);
        }
        let slope = sxy / sxx;
        let next_x = window.last().unwrap().interval_index as f64 + 1.0;
        (y_mean + slope * (next_x - x_mean)).max(0.0)
    }

    fn clamp(&self, value: f64) -> f64 {
        let upper = self.config.capacity_cap.unwrap_or(f64::INFINITY);
        value.max(0.0).min(upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{BandwidthSample, BandwidthTrace};
    use proptest::prelude::*;

    fn predictor(technique: Technique, initial: f64) -> Predictor {
        let config = PredictorConfig { initial_gbr: Some(initial), ..PredictorConfig::new(technique) };
        Predictor::new(config).unwrap()
    }

    #[test]
    fn technique_names_round_trip() {
        for t in Technique::ALL {
            assert_eq!(t.name().parse::<Technique>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.name()));
        }
        assert!("maximal".parse::<Technique>().is_err());
    }

    #[test]
    fn fresh_predictor_requests_initial_gbr() {
        let p = predictor(Technique::Max, 7.5);
        assert_eq!(p.current_request(), 7.5);
        assert_eq!(p.predict_next(), 7.5);
    }

    #[test]
    fn max_tracks_previous_interval_peak() {
        let mut p = predictor(Technique::Max, 1.0);
        p.observe_interval(&[3.0, 9.0, 4.0]).unwrap();
        assert_eq!(p.predict_next_max(), 9.0);
        p.observe_interval(&[2.0, 2.5]).unwrap();
        assert_eq!(p.predict_next_max(), 2.5);
    }

    #[test]
    fn modified_max_raises_baseline_by_mean_excess() {
        // Request 5 was overrun by samples 6 and 7 (mean excess 1.5);
        // next request = interval peak 7 + 1.5.
        let config = PredictorConfig {
            window_t: 1,
            initial_gbr: Some(5.0),
            ..PredictorConfig::new(Technique::ModifiedMax)
        };
        let mut p = Predictor::new(config).unwrap();
        p.observe_interval(&[4.0, 6.0, 7.0]).unwrap();
        assert_eq!(p.predict_next_modified_max(), 8.5);
        assert_eq!(p.current_request(), 8.5);
    }

    #[test]
    fn modified_max_lowers_baseline_by_mean_shortfall() {
        // Request 10 was never reached; shortfalls 4, 3, 2 (mean 3);
        // next request = interval peak 8 - 3.
        let config = PredictorConfig {
            window_t: 1,
            initial_gbr: Some(10.0),
            ..PredictorConfig::new(Technique::ModifiedMax)
        };
        let mut p = Predictor::new(config).unwrap();
        p.observe_interval(&[6.0, 7.0, 8.0]).unwrap();
        assert_eq!(p.predict_next_modified_max(), 5.0);
    }

    #[test]
    fn modified_max_equals_max_when_demand_matched_requests_exactly() {
        let mut mm = predictor(Technique::ModifiedMax, 6.0);
        let mut mx = predictor(Technique::Max, 6.0);
        // Every sample equals the request in force, so no deviation ever
        // accumulates: 6 while 6 is in force, then the prediction stays 6.
        for _ in 0..4 {
            mm.observe_interval(&[6.0, 6.0]).unwrap();
            mx.observe_interval(&[6.0, 6.0]).unwrap();
            assert_eq!(mm.predict_next_modified_max(), mx.predict_next_max());
        }
    }

    #[test]
    fn history_keeps_only_the_lookback_window() {
        let config = PredictorConfig {
            window_t: 2,
            initial_gbr: Some(1.0),
            ..PredictorConfig::new(Technique::ModifiedMax)
        };
        let mut p = Predictor::new(config).unwrap();
        p.observe_interval(&[1.0]).unwrap();
        assert_eq!(p.history().len(), 1);
        p.observe_interval(&[2.0]).unwrap();
        p.observe_interval(&[3.0]).unwrap();
        assert_eq!(p.history().len(), 2);
        assert_eq!(p.history()[0].samples, [2.0]);
        assert_eq!(p.intervals_observed(), 3);
    }

    #[test]
    fn empty_and_non_finite_intervals_are_rejected() {
        let mut p = predictor(Technique::Max, 1.0);
        assert_eq!(p.observe_interval(&[]), Err(PredictorError::EmptyInterval));
        assert_eq!(p.observe_interval(&[1.0, f64::NAN]), Err(PredictorError::InvalidSample(1)));
    }

    #[test]
    fn moving_average_of_interval_maxima() {
        let config = PredictorConfig {
            ma_window: 2,
            initial_gbr: Some(99.0),
            ..PredictorConfig::new(Technique::MovingAverage)
        };
        let mut p = Predictor::new(config).unwrap();
        assert_eq!(p.predict_next_baseline(), 99.0);
        p.observe_interval(&[4.0, 1.0]).unwrap();
        assert_eq!(p.predict_next_baseline(), 4.0);
        p.observe_interval(&[6.0]).unwrap();
        assert_eq!(p.predict_next_baseline(), 5.0);
        // Window slides: maxima are now 6 and 2.
        p.observe_interval(&[2.0]).unwrap();
        assert_eq!(p.predict_next_baseline(), 4.0);
    }

    #[test]
    fn ewma_weights_newest_maximum() {
        let config = PredictorConfig {
            ewma_alpha: 0.3,
            initial_gbr: Some(50.0),
            ..PredictorConfig::new(Technique::Ewma)
        };
        let mut p = Predictor::new(config).unwrap();
        assert_eq!(p.predict_next_baseline(), 50.0);
        p.observe_interval(&[10.0]).unwrap();
        assert_eq!(p.predict_next_baseline(), 10.0);
        p.observe_interval(&[20.0]).unwrap();
        assert_eq!(p.predict_next_baseline(), 0.3 * 20.0 + 0.7 * 10.0);
    }

    #[test]
    fn linreg_extrapolates_interval_maxima() {
        let config = PredictorConfig {
            ma_window: 3,
            initial_gbr: Some(42.0),
            ..PredictorConfig::new(Technique::Linreg)
        };
        let mut p = Predictor::new(config).unwrap();
        p.observe_interval(&[2.0]).unwrap();
        // One point cannot define a trend.
        assert_eq!(p.predict_next_baseline(), 42.0);
        p.observe_interval(&[4.0]).unwrap();
        p.observe_interval(&[6.0]).unwrap();
        assert_eq!(p.predict_next_baseline(), 8.0);
    }

    #[test]
    fn linreg_clamps_downward_trends_at_zero() {
        let config = PredictorConfig {
            ma_window: 2,
            initial_gbr: Some(42.0),
            ..PredictorConfig::new(Technique::Linreg)
        };
        let mut p = Predictor::new(config).unwrap();
        p.observe_interval(&[9.0]).unwrap();
        p.observe_interval(&[1.0]).unwrap();
        // Trend extrapolates to -7; prediction floors at zero.
        assert_eq!(p.predict_next_baseline(), 0.0);
    }

    #[test]
    fn static_worst_case_needs_trace_context_and_stays_constant() {
        let config = PredictorConfig::new(Technique::StaticWorstCase);
        assert_eq!(
            Predictor::new(config.clone()).unwrap_err(),
            PredictorError::MissingTraceContext(Technique::StaticWorstCase)
        );
        let samples = [3.0, 11.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &r)| BandwidthSample { timestamp_ms: i as i64 * 1000, bitrate_bps: r })
            .collect();
        let trace = BandwidthTrace::new("cam", 1.0, samples).unwrap();
        let mut p = Predictor::for_trace(config, &trace).unwrap();
        assert_eq!(p.predict_next(), 11.0);
        p.observe_interval(&[1.0]).unwrap();
        p.observe_interval(&[2.0]).unwrap();
        assert_eq!(p.predict_next(), 11.0);
    }

    #[test]
    fn for_trace_primes_initial_request_from_first_sample() {
        let trace = BandwidthTrace::new(
            "cam",
            1.0,
            vec![BandwidthSample { timestamp_ms: 0, bitrate_bps: 3.5 }],
        )
        .unwrap();
        let p = Predictor::for_trace(PredictorConfig::new(Technique::Max), &trace).unwrap();
        assert_eq!(p.current_request(), 7.0);
    }

    #[test]
    fn predictions_respect_capacity_cap() {
        let config = PredictorConfig {
            capacity_cap: Some(5.0),
            initial_gbr: Some(9.0),
            ..PredictorConfig::new(Technique::Max)
        };
        let mut p = Predictor::new(config).unwrap();
        assert_eq!(p.current_request(), 5.0);
        p.observe_interval(&[8.0, 12.0]).unwrap();
        assert_eq!(p.predict_next(), 5.0);
    }

    #[test]
    fn modified_max_never_predicts_below_zero() {
        let config = PredictorConfig {
            window_t: 1,
            initial_gbr: Some(100.0),
            ..PredictorConfig::new(Technique::ModifiedMax)
        };
        let mut p = Predictor::new(config).unwrap();
        // Shortfall mean (99) far exceeds the baseline peak (2).
        p.observe_interval(&[1.0, 2.0]).unwrap();
        assert_eq!(p.predict_next(), 0.0);
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let mut config = PredictorConfig::new(Technique::Max);
        config.initial_gbr = Some(1.0);
        config.window_t = 0;
        assert!(matches!(Predictor::new(config.clone()), Err(PredictorError::InvalidConfig(_))));
        config.window_t = 3;
        config.ewma_alpha = 0.0;
        assert!(matches!(Predictor::new(config.clone()), Err(PredictorError::InvalidConfig(_))));
        config.ewma_alpha = 1.5;
        assert!(matches!(Predictor::new(config.clone()), Err(PredictorError::InvalidConfig(_))));
        config.ewma_alpha = 0.3;
        config.initial_gbr = None;
        assert_eq!(Predictor::new(config).unwrap_err(), PredictorError::MissingInitialGbr);
    }

    #[test]
    fn replaying_identical_observations_reproduces_requests() {
        for technique in [Technique::Max, Technique::ModifiedMax, Technique::Ewma] {
            let mut a = predictor(technique, 4.0);
            let mut b = predictor(technique, 4.0);
            for chunk in [[1.0, 5.0], [4.0, 2.0], [6.0, 6.5]] {
                a.observe_interval(&chunk).unwrap();
                b.observe_interval(&chunk).unwrap();
                assert_eq!(a.current_request(), b.current_request());
            }
        }
    }

    proptest! {
        /// The deviation shift moves the prediction to whichever side of
        /// the baseline the window's deviations point: above iff any
        /// sample overran its request, below iff some fell short and
        /// none overran, exactly the baseline when demand matched.
        #[test]
        fn modified_max_deviation_shift_follows_window(
            intervals in prop::collection::vec(
                prop::collection::vec(1.0..1000.0f64, 1..20),
                1..8,
            ),
            window_t in 1usize..5,
            initial in 1.0..1000.0f64,
        ) {
            let config = PredictorConfig {
                window_t,
                initial_gbr: Some(initial),
                ..PredictorConfig::new(Technique::ModifiedMax)
            };
            let mut p = Predictor::new(config).unwrap();
            let mut pairings: Vec<(f64, Vec<f64>)> = Vec::new();
            for samples in &intervals {
                pairings.push((p.current_request(), samples.clone()));
                p.observe_interval(samples).unwrap();
            }

            let window = &pairings[pairings.len() - window_t.min(pairings.len())..];
            let over_exists =
                window.iter().any(|(gbr, samples)| samples.iter().any(|s| s > gbr));
            let under_exists =
                window.iter().any(|(gbr, samples)| samples.iter().any(|s| s < gbr));
            let baseline =
                pairings.last().unwrap().1.iter().copied().fold(f64::NEG_INFINITY, f64::max);

            let prediction = p.predict_next_modified_max();
            if over_exists {
                prop_assert!(prediction >= baseline);
            } else if under_exists {
                prop_assert!(prediction <= baseline);
            } else {
                prop_assert_eq!(prediction, baseline);
            }
        }
    }
}
