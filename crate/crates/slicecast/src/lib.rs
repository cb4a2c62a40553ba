//! Trace-driven sizing of guaranteed-bitrate (GBR) requests for 5G
//! network slices.
//!
//! A slice tenant periodically asks the network for a guaranteed
//! bitrate. Asking for too much wastes money on every reserved bit;
//! asking for too little drops traffic. This crate replays recorded
//! (or synthesized) per-stream bandwidth traces against a family of
//! request strategies and scores each one with an asymmetric
//! over/under-subscription cost, so the cheapest strategy for a given
//! workload can be picked from data rather than folklore.
//!
//! The pieces compose in one direction: [`trace`] produces uniform
//! bandwidth traces, [`predictor`] turns interval observations into
//! the next GBR request, [`sim`] replays whole traces through
//! predictors and a capacity-limited slice controller, and [`cost`]
//! scores the resulting reservation ledgers. [`cli`] wraps the same
//! functions for the `slicecast` binary.
//!
//! ```
//! use slicecast::{run_simulation, PredictorConfig, SimConfig, SyntheticTraceConfig, Technique};
//!
//! // One synthetic stream, ten minutes at 1 Hz.
//! let trace = SyntheticTraceConfig { duration: 600.0, ..Default::default() }
//!     .generate("stream_0")?;
//!
//! // Re-request the GBR every 60 s using the deviation-tracking
//! // technique, and score everything after the first interval.
//! let config = SimConfig {
//!     interval: 60.0,
//!     ..SimConfig::new(PredictorConfig::new(Technique::ModifiedMax))
//! };
//! let result = run_simulation(&[trace], &config)?;
//!
//! let ledger = &result.aggregate.subscription;
//! assert!(ledger.over_fraction + ledger.under_fraction <= 1.0);
//! assert!(ledger.total_cost.is_finite());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! Every public entry point is deterministic: traces are seeded, the
//! replay is a pure function of its inputs, and serialized outputs use
//! sorted maps, so identical inputs produce byte-identical artifacts.

pub mod cli;
pub mod cost;
pub mod predictor;
pub mod sim;
pub mod trace;

mod numeric;

pub use cost::{
    bandwidth_savings, classic_metrics, subscription_flags, subscription_metrics, total_cost,
    ClassicMetrics, CostError, CostParams, SubscriptionMetrics,
};
pub use predictor::{
    IntervalObservation, PredictionRecord, Predictor, PredictorConfig, PredictorError, Technique,
};
pub use sim::{
    aggregate_requests, run_simulation, slice_modify, AggregateReport, SimConfig, SimError,
    SimulationResult, SliceController, SliceRequest, StreamReport, SCHEMA_VERSION,
};
pub use trace::{
    BandwidthSample, BandwidthTrace, SyntheticTraceConfig, TraceError, TraceStats,
};
