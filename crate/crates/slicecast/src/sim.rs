//! Trace replay against a mock slice controller.
//!
//! Each reconfiguration interval runs the same sequence: every stream's
//! predictor issues its GBR request, the requests are summed into one
//! slice modification, the controller grants up to its capacity, and the
//! interval's demand samples are charged against what was requested
//! (per stream) and granted (aggregate). Only then do the predictors see
//! the interval's samples, so the replay is open loop: lost bits never
//! distort the demand the predictors learn from.
//!
//! `warmup_intervals` bootstrap intervals stay in the request ledger but
//! are excluded from every reported metric. The whole run is a pure
//! function of traces and config, and results serialize with sorted
//! stream keys, so identical inputs give byte-identical reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{
    self, ClassicMetrics, CostError, CostParams, SubscriptionMetrics,
};
use crate::numeric::KahanSum;
use crate::predictor::{
    PredictionRecord, Predictor, PredictorConfig, PredictorError, Technique,
};
use crate::trace::BandwidthTrace;

/// Schema tag carried by every serialized [`SimulationResult`].
pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no traces supplied")]
    NoTraces,
    #[error("traces not aligned: {0}")]
    Misaligned(String),
    #[error("duplicate stream id \"{0}\"")]
    DuplicateStream(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("warmup of {warmup_intervals} intervals leaves {remaining} samples; at least 2 are needed")]
    WarmupExhaustsTrace { warmup_intervals: u32, remaining: usize },
    #[error("negative slice request: {0}")]
    NegativeRequest(f64),
    #[error("nothing to aggregate")]
    EmptyAggregation,
    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sampling period must be finite and positive, got {0}")]
    InvalidSamplingPeriod(f64),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Replay parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Reconfiguration interval in seconds; must be a whole multiple of
    /// the trace sampling period.
    #[serde(default = "default_interval")]
    pub interval: f64,
    /// Leading intervals excluded from metrics.
    #[serde(default = "default_warmup_intervals")]
    pub warmup_intervals: u32,
    /// Aggregate capacity the controller can grant, in bits/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_capacity: Option<f64>,
    #[serde(default)]
    pub cost: CostParams,
    pub predictor: PredictorConfig,
}

fn default_interval() -> f64 {
    300.0
}

fn default_warmup_intervals() -> u32 {
    1
}

impl SimConfig {
    pub fn new(predictor: PredictorConfig) -> Self {
        Self {
            interval: default_interval(),
            warmup_intervals: default_warmup_intervals(),
            slice_capacity: None,
            cost: CostParams::default(),
            predictor,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !self.interval.is_finite() || self.interval <= 0.0 {
            return Err(SimError::InvalidInterval(format!("{} s", self.interval)));
        }
        if let Some(cap) = self.slice_capacity {
            if !cap.is_finite() || cap < 0.0 {
                return Err(SimError::InvalidInterval(format!("slice_capacity {cap}")));
            }
        }
        self.cost.validate()?;
        self.predictor.validate()?;
        Ok(())
    }
}

/// One slice modification: what the aggregate asked for and received.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceRequest {
    pub interval_index: u64,
    pub requested_gbr: f64,
    pub granted_gbr: f64,
}

/// Grant rule of the mock controller: everything up to capacity.
pub fn slice_modify(request: f64, capacity: Option<f64>) -> Result<f64, SimError> {
    if !request.is_finite() || request < 0.0 {
        return Err(SimError::NegativeRequest(request));
    }
    Ok(match capacity {
        Some(cap) => request.min(cap),
        None => request,
    })
}

/// Mock slice controller that logs every modification it serves.
#[derive(Debug, Clone)]
pub struct SliceController {
    capacity: Option<f64>,
    log: Vec<SliceRequest>,
}

impl SliceController {
    pub fn new(capacity: Option<f64>) -> Self {
        Self { capacity, log: Vec::new() }
    }

    /// Applies the grant rule and appends the call to the request log.
    pub fn modify(&mut self, request: f64) -> Result<f64, SimError> {
        let granted = slice_modify(request, self.capacity)?;
        self.log.push(SliceRequest {
            interval_index: self.log.len() as u64,
            requested_gbr: request,
            granted_gbr: granted,
        });
        Ok(granted)
    }

    pub fn log(&self) -> &[SliceRequest] {
        &self.log
    }

    pub fn into_log(self) -> Vec<SliceRequest> {
        self.log
    }
}

/// Sums per-stream requests into the aggregate slice request.
pub fn aggregate_requests(requests: &[f64]) -> Result<f64, SimError> {
    if requests.is_empty() {
        return Err(SimError::EmptyAggregation);
    }
    let mut sum = 0.0;
    for &r in requests {
        if !r.is_finite() || r < 0.0 {
            return Err(SimError::NegativeRequest(r));
        }
        sum += r;
    }
    Ok(sum)
}

/// Bits dropped when demand exceeded the grant:
/// `sum(max(0, actual_t - granted_t)) * sampling_period`.
pub fn account_data_loss(
    actual: &[f64],
    granted: &[f64],
    sampling_period: f64,
) -> Result<f64, SimError> {
    if actual.len() != granted.len() {
        return Err(SimError::LengthMismatch { left: actual.len(), right: granted.len() });
    }
    if !sampling_period.is_finite() || sampling_period <= 0.0 {
        return Err(SimError::InvalidSamplingPeriod(sampling_period));
    }
    let mut lost = KahanSum::new();
    for (&a, &g) in actual.iter().zip(granted) {
        if a > g {
            lost.add(a - g);
        }
    }
    Ok(lost.value() * sampling_period)
}

/// One stream's replay outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamReport {
    pub predictions: Vec<PredictionRecord>,
    pub subscription: SubscriptionMetrics,
    pub classic: ClassicMetrics,
}

/// Slice-level replay outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub requests: Vec<SliceRequest>,
    pub subscription: SubscriptionMetrics,
    pub data_loss_bits: f64,
}

/// Complete outcome of one replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub schema_version: String,
    pub technique: Technique,
    pub config: SimConfig,
    pub per_stream: BTreeMap<String, StreamReport>,
    pub aggregate: AggregateReport,
}

/// Validates that all traces live on one uniform, shared sample grid and
/// returns samples-per-interval plus total sample count.
fn check_alignment(
    traces: &[&BandwidthTrace],
    interval: f64,
) -> Result<(usize, usize), SimError> {
    let first = traces[0];
    for t in traces {
        if !t.is_uniform() {
            return Err(SimError::Misaligned(format!(
                "stream \"{}\" is not uniformly sampled; resample it first",
                t.stream_id()
            )));
        }
        if t.sampling_period() != first.sampling_period() {
            return Err(SimError::Misaligned(format!(
                "stream \"{}\" is sampled every {} s, expected {} s",
                t.stream_id(),
                t.sampling_period(),
                first.sampling_period()
            )));
        }
        if t.samples()[0].timestamp_ms != first.samples()[0].timestamp_ms {
            return Err(SimError::Misaligned(format!(
                "stream \"{}\" starts at {} ms, expected {} ms",
                t.stream_id(),
                t.samples()[0].timestamp_ms,
                first.samples()[0].timestamp_ms
            )));
        }
        if t.len() != first.len() {
            return Err(SimError::Misaligned(format!(
                "stream \"{}\" has {} samples, expected {}",
                t.stream_id(),
                t.len(),
                first.len()
            )));
        }
    }

    let period = first.sampling_period();
    let ratio = interval / period;
    let spi = ratio.round();
    if spi < 1.0 {
        return Err(SimError::InvalidInterval(format!(
            "interval {interval} s is shorter than the {period} s sampling period"
        )));
    }
    if (ratio - spi).abs() > 1e-9 * ratio.max(1.0) {
        return Err(SimError::InvalidInterval(format!(
            "interval {interval} s is not a whole multiple of the {period} s sampling period"
        )));
    }
    Ok((spi as usize, first.len()))
}

/// Replays aligned traces under one technique and scores the outcome.
pub fn run_simulation(
    traces: &[BandwidthTrace],
    config: &SimConfig,
) -> Result<SimulationResult, SimError> {
    config.validate()?;
    if traces.is_empty() {
        return Err(SimError::NoTraces);
    }

    // Canonical stream order, so aggregation and serialization are
    // independent of argument order.
    let mut sorted: Vec<&BandwidthTrace> = traces.iter().collect();
    sorted.sort_by(|a, b| a.stream_id().cmp(b.stream_id()));
    for pair in sorted.windows(2) {
        if pair[0].stream_id() == pair[1].stream_id() {
            return Err(SimError::DuplicateStream(pair[0].stream_id().to_string()));
        }
    }

    let (spi, n) = check_alignment(&sorted, config.interval)?;
    let num_intervals = n.div_ceil(spi);
    let warmup_samples = (config.warmup_intervals as usize).saturating_mul(spi).min(n);
    let remaining = n - warmup_samples;
    if remaining < 2 {
        return Err(SimError::WarmupExhaustsTrace {
            warmup_intervals: config.warmup_intervals,
            remaining,
        });
    }

    let rates: Vec<Vec<f64>> = sorted
        .iter()
        .map(|t| t.samples().iter().map(|s| s.bitrate_bps).collect())
        .collect();
    let mut predictors = sorted
        .iter()
        .map(|t| Predictor::for_trace(config.predictor.clone(), t))
        .collect::<Result<Vec<_>, _>>()?;

    let mut aggregate_actual = vec![0.0f64; n];
    for stream in &rates {
        for (acc, &r) in aggregate_actual.iter_mut().zip(stream) {
            *acc += r;
        }
    }

    let mut controller = SliceController::new(config.slice_capacity);
    let mut requested: Vec<Vec<f64>> = vec![vec![0.0; n]; sorted.len()];
    let mut records: Vec<Vec<PredictionRecord>> =
        vec![Vec::with_capacity(num_intervals); sorted.len()];
    let mut granted_series = vec![0.0f64; n];

    for k in 0..num_intervals {
        let start = k * spi;
        let end = n.min(start + spi);

        let mut interval_requests = Vec::with_capacity(sorted.len());
        for (s, predictor) in predictors.iter().enumerate() {
            let gbr = predictor.current_request();
            interval_requests.push(gbr);
            requested[s][start..end].fill(gbr);
            records[s].push(PredictionRecord {
                stream_id: sorted[s].stream_id().to_string(),
                interval_index: k as u64,
                requested_gbr: gbr,
                technique: config.predictor.technique,
            });
        }

        let aggregate = aggregate_requests(&interval_requests)?;
        let granted = controller.modify(aggregate)?;
        granted_series[start..end].fill(granted);

        for (s, predictor) in predictors.iter_mut().enumerate() {
            predictor.observe_interval(&rates[s][start..end])?;
        }
    }

    let w = warmup_samples;
    let mut per_stream = BTreeMap::new();
    for (s, trace) in sorted.iter().enumerate() {
        let actual = &rates[s][w..];
        let gbr = &requested[s][w..];
        per_stream.insert(
            trace.stream_id().to_string(),
            StreamReport {
                predictions: std::mem::take(&mut records[s]),
                subscription: cost::subscription_metrics(actual, gbr, &config.cost)?,
                classic: cost::classic_metrics(actual, gbr)?,
            },
        );
    }

    let sampling_period = sorted[0].sampling_period();
    let aggregate = AggregateReport {
        subscription: cost::subscription_metrics(
            &aggregate_actual[w..],
            &granted_series[w..],
            &config.cost,
        )?,
        data_loss_bits: account_data_loss(
            &aggregate_actual[w..],
            &granted_series[w..],
            sampling_period,
        )?,
        requests: controller.into_log(),
    };

    Ok(SimulationResult {
        schema_version: SCHEMA_VERSION.to_string(),
        technique: config.predictor.technique,
        config: config.clone(),
        per_stream,
        aggregate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::BandwidthSample;

    fn uniform_trace(id: &str, rates: &[f64]) -> BandwidthTrace {
        let samples = rates
            .iter()
            .enumerate()
            .map(|(i, &r)| BandwidthSample { timestamp_ms: i as i64 * 1000, bitrate_bps: r })
            .collect();
        BandwidthTrace::new(id, 1.0, samples).unwrap()
    }

    fn config(technique: Technique, interval: f64) -> SimConfig {
        SimConfig {
            interval,
            ..SimConfig::new(PredictorConfig::new(technique))
        }
    }

    #[test]
    fn grant_rule_caps_at_capacity() {
        assert_eq!(slice_modify(10.0, None).unwrap(), 10.0);
        assert_eq!(slice_modify(10.0, Some(4.0)).unwrap(), 4.0);
        assert_eq!(slice_modify(3.0, Some(4.0)).unwrap(), 3.0);
        assert!(matches!(slice_modify(-1.0, None), Err(SimError::NegativeRequest(_))));
    }

    #[test]
    fn controller_logs_every_modification() {
        let mut c = SliceController::new(Some(5.0));
        c.modify(3.0).unwrap();
        c.modify(8.0).unwrap();
        assert_eq!(
            c.log(),
            &[
                SliceRequest { interval_index: 0, requested_gbr: 3.0, granted_gbr: 3.0 },
                SliceRequest { interval_index: 1, requested_gbr: 8.0, granted_gbr: 5.0 },
            ]
        );
    }

    #[test]
    fn aggregation_sums_requests() {
        assert_eq!(aggregate_requests(&[1.0, 2.5, 3.0]).unwrap(), 6.5);
        assert!(matches!(aggregate_requests(&[]), Err(SimError::EmptyAggregation)));
        assert!(matches!(aggregate_requests(&[1.0, -2.0]), Err(SimError::NegativeRequest(_))));
    }

    #[test]
    fn data_loss_hand_values() {
        assert_eq!(account_data_loss(&[10.0], &[8.0], 1.0).unwrap(), 2.0);
        assert_eq!(account_data_loss(&[3.0], &[5.0], 1.0).unwrap(), 0.0);
        assert_eq!(account_data_loss(&[10.0, 3.0], &[8.0, 5.0], 0.5).unwrap(), 1.0);
        assert!(matches!(
            account_data_loss(&[1.0], &[1.0, 2.0], 1.0),
            Err(SimError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn steady_demand_costs_nothing_after_warmup() {
        let traces = [uniform_trace("a", &[4.0; 12]), uniform_trace("b", &[2.0; 12])];
        let result = run_simulation(&traces, &config(Technique::Max, 2.0)).unwrap();
        assert_eq!(result.aggregate.subscription.total_cost, 0.0);
        assert_eq!(result.aggregate.data_loss_bits, 0.0);
        for report in result.per_stream.values() {
            assert_eq!(report.subscription.total_cost, 0.0);
            assert_eq!(report.subscription.over_count, 0);
            assert_eq!(report.subscription.under_count, 0);
        }
        // Ledger covers warmup too: 6 intervals of 2 s.
        assert_eq!(result.aggregate.requests.len(), 6);
        assert_eq!(result.per_stream["a"].predictions.len(), 6);
    }

    #[test]
    fn static_worst_case_never_oversubscribes_or_drops() {
        let traces = [
            uniform_trace("a", &[4.0, 9.0, 1.0, 7.0, 3.0, 8.0]),
            uniform_trace("b", &[2.0, 1.0, 5.0, 2.0, 2.0, 0.5]),
        ];
        let result =
            run_simulation(&traces, &config(Technique::StaticWorstCase, 2.0)).unwrap();
        assert_eq!(result.aggregate.subscription.over_count, 0);
        assert_eq!(result.aggregate.data_loss_bits, 0.0);
        for report in result.per_stream.values() {
            assert_eq!(report.subscription.over_count, 0);
        }
        // Every request is the sum of the whole-trace maxima.
        for r in &result.aggregate.requests {
            assert_eq!(r.requested_gbr, 9.0 + 5.0);
        }
    }

    #[test]
    fn aggregate_request_is_sum_of_stream_requests() {
        let traces = [
            uniform_trace("a", &[4.0, 9.0, 1.0, 7.0, 3.0, 8.0]),
            uniform_trace("b", &[2.0, 1.0, 5.0, 2.0, 2.0, 0.5]),
            uniform_trace("c", &[1.5, 1.0, 2.0, 2.5, 0.0, 1.0]),
        ];
        let result = run_simulation(&traces, &config(Technique::ModifiedMax, 2.0)).unwrap();
        for (k, req) in result.aggregate.requests.iter().enumerate() {
            let sum: f64 = result
                .per_stream
                .values()
                .map(|s| s.predictions[k].requested_gbr)
                .sum();
            assert_eq!(req.requested_gbr, sum);
        }
    }

    #[test]
    fn capacity_shortfall_becomes_data_loss() {
        // Demand 10 every sample; capacity 4; 1 s sampling.
        let traces = [uniform_trace("a", &[10.0; 6])];
        let mut cfg = config(Technique::Max, 2.0);
        cfg.slice_capacity = Some(4.0);
        let result = run_simulation(&traces, &cfg).unwrap();
        // Post-warmup: 4 samples, each dropping 6 bits/s for 1 s.
        assert_eq!(result.aggregate.data_loss_bits, 24.0);
        for r in &result.aggregate.requests {
            assert_eq!(r.granted_gbr, r.requested_gbr.min(4.0));
        }
    }

    #[test]
    fn replay_is_open_loop_despite_capacity_losses() {
        let traces = [
            uniform_trace("a", &[4.0, 9.0, 1.0, 7.0, 3.0, 8.0]),
            uniform_trace("b", &[2.0, 1.0, 5.0, 2.0, 2.0, 0.5]),
        ];
        let unconstrained = run_simulation(&traces, &config(Technique::ModifiedMax, 2.0)).unwrap();
        let mut cfg = config(Technique::ModifiedMax, 2.0);
        cfg.slice_capacity = Some(3.0);
        let constrained = run_simulation(&traces, &cfg).unwrap();
        for id in ["a", "b"] {
            assert_eq!(
                constrained.per_stream[id].predictions,
                unconstrained.per_stream[id].predictions
            );
        }
        assert!(constrained.aggregate.data_loss_bits > 0.0);
    }

    #[test]
    fn partial_final_interval_is_still_replayed() {
        let traces = [uniform_trace("a", &[1.0, 2.0, 3.0, 4.0, 5.0])];
        let result = run_simulation(&traces, &config(Technique::Max, 2.0)).unwrap();
        assert_eq!(result.aggregate.requests.len(), 3);
        assert_eq!(result.per_stream["a"].predictions.len(), 3);
    }

    #[test]
    fn reserved_total_matches_granted_ledger() {
        let traces = [
            uniform_trace("a", &[4.0, 9.0, 1.0, 7.0, 3.0, 8.0, 2.0, 6.0]),
            uniform_trace("b", &[2.0, 1.0, 5.0, 2.0, 2.0, 0.5, 3.0, 1.0]),
        ];
        let result = run_simulation(&traces, &config(Technique::Ewma, 2.0)).unwrap();
        // Warmup is one 2-sample interval; each later grant covers 2 samples.
        let expected: f64 =
            result.aggregate.requests[1..].iter().map(|r| r.granted_gbr * 2.0).sum();
        let got = result.aggregate.subscription.reserved_total;
        assert!((got - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn misaligned_traces_are_rejected() {
        let base = uniform_trace("a", &[1.0, 2.0, 3.0, 4.0]);
        let cfg = config(Technique::Max, 2.0);

        let short = uniform_trace("b", &[1.0, 2.0, 3.0]);
        assert!(matches!(
            run_simulation(&[base.clone(), short], &cfg),
            Err(SimError::Misaligned(_))
        ));

        let coarse = BandwidthTrace::new(
            "b",
            2.0,
            (0..4)
                .map(|i| BandwidthSample { timestamp_ms: i * 2000, bitrate_bps: 1.0 })
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            run_simulation(&[base.clone(), coarse], &cfg),
            Err(SimError::Misaligned(_))
        ));

        let shifted = BandwidthTrace::new(
            "b",
            1.0,
            (0..4)
                .map(|i| BandwidthSample { timestamp_ms: 500 + i * 1000, bitrate_bps: 1.0 })
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            run_simulation(&[base.clone(), shifted], &cfg),
            Err(SimError::Misaligned(_))
        ));

        let ragged = BandwidthTrace::new(
            "b",
            1.0,
            vec![
                BandwidthSample { timestamp_ms: 0, bitrate_bps: 1.0 },
                BandwidthSample { timestamp_ms: 1000, bitrate_bps: 1.0 },
                BandwidthSample { timestamp_ms: 2500, bitrate_bps: 1.0 },
                BandwidthSample { timestamp_ms: 3500, bitrate_bps: 1.0 },
            ],
        )
        .unwrap();
        assert!(matches!(
            run_simulation(&[base, ragged], &cfg),
            Err(SimError::Misaligned(_))
        ));
    }

    #[test]
    fn duplicate_stream_ids_are_rejected() {
        let traces = [uniform_trace("a", &[1.0; 4]), uniform_trace("a", &[2.0; 4])];
        assert!(matches!(
            run_simulation(&traces, &config(Technique::Max, 2.0)),
            Err(SimError::DuplicateStream(_))
        ));
    }

    #[test]
    fn interval_must_be_a_whole_multiple_of_the_period() {
        let traces = [uniform_trace("a", &[1.0; 8])];
        assert!(matches!(
            run_simulation(&traces, &config(Technique::Max, 2.5)),
            Err(SimError::InvalidInterval(_))
        ));
        assert!(matches!(
            run_simulation(&traces, &config(Technique::Max, 0.5)),
            Err(SimError::InvalidInterval(_))
        ));
    }

    #[test]
    fn warmup_cannot_consume_the_whole_trace() {
        let traces = [uniform_trace("a", &[1.0; 4])];
        let mut cfg = config(Technique::Max, 2.0);
        cfg.warmup_intervals = 2;
        assert!(matches!(
            run_simulation(&traces, &cfg),
            Err(SimError::WarmupExhaustsTrace { .. })
        ));
    }

    #[test]
    fn result_order_is_independent_of_trace_order() {
        let a = uniform_trace("a", &[4.0, 9.0, 1.0, 7.0]);
        let b = uniform_trace("b", &[2.0, 1.0, 5.0, 2.0]);
        let cfg = config(Technique::Max, 2.0);
        let forward = run_simulation(&[a.clone(), b.clone()], &cfg).unwrap();
        let reverse = run_simulation(&[b, a], &cfg).unwrap();
        assert_eq!(forward, reverse);
        assert_eq!(
            serde_json::to_string(&forward).unwrap(),
            serde_json::to_string(&reverse).unwrap()
        );
    }

    #[test]
    fn serialized_result_carries_schema_and_config_echo() {
        let traces = [uniform_trace("a", &[1.0, 2.0, 3.0, 4.0])];
        let result = run_simulation(&traces, &config(Technique::Max, 2.0)).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&result).unwrap()).unwrap();
        assert_eq!(json["schema_version"], "v1");
        assert_eq!(json["technique"], "max");
        assert_eq!(json["config"]["interval"], 2.0);
        assert_eq!(json["config"]["predictor"]["technique"], "max");
        assert!(json["per_stream"]["a"]["subscription"]["total_cost"].is_number());
    }
}
