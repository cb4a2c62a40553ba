//! Command implementations behind the `slicecast` binary.
//!
//! Three commands cover the workflow: `generate` synthesizes a trace
//! suite, `simulate` replays one technique, and `compare` replays many
//! and ranks them. Everything here is a pure function of the input
//! files: no clocks, no ambient entropy, and all outputs are written
//! atomically (temp file + rename), so reruns produce byte-identical
//! artifacts and never leave half-written files behind.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{self, CostError};
use crate::predictor::Technique;
use crate::sim::{run_simulation, SimConfig, SimError, SimulationResult};
use crate::trace::{BandwidthTrace, SyntheticTraceConfig, TraceError};

/// Errors split by exit code: usage/validation problems exit 2,
/// runtime failures exit 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CostError> for CliError {
    fn from(e: CostError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Io(io) => CliError::Runtime(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn runtime(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{context}: {e}"))
}

/// Loads a generator config from JSON.
pub fn load_synth_config(path: &Path) -> Result<SyntheticTraceConfig, CliError> {
    let file = File::open(path).map_err(|e| runtime(&path.display().to_string(), e))?;
    serde_json::from_reader(file)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Loads a simulation config from JSON.
pub fn load_sim_config(path: &Path) -> Result<SimConfig, CliError> {
    let file = File::open(path).map_err(|e| runtime(&path.display().to_string(), e))?;
    serde_json::from_reader(file)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Parses trace CSVs, naming each stream after its file stem, and
/// returns them sorted by stream id.
pub fn load_traces(paths: &[PathBuf]) -> Result<Vec<BandwidthTrace>, CliError> {
    if paths.is_empty() {
        return Err(CliError::Usage("at least one trace file is required".into()));
    }
    let mut traces = Vec::with_capacity(paths.len());
    for path in paths {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| CliError::Usage(format!("{}: no file stem", path.display())))?;
        let file = File::open(path).map_err(|e| runtime(&path.display().to_string(), e))?;
        let trace = BandwidthTrace::parse_csv(file, stem)
            .map_err(|e| match CliError::from(e) {
                CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
                CliError::Runtime(msg) => CliError::Runtime(format!("{}: {msg}", path.display())),
            })?;
        traces.push(trace);
    }
    traces.sort_by(|a, b| a.stream_id().cmp(b.stream_id()).then(a.len().cmp(&b.len())));
    Ok(traces)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| runtime(&dir.display().to_string(), e))?;
    tmp.write_all(bytes).map_err(|e| runtime(&path.display().to_string(), e))?;
    tmp.persist(path).map_err(|e| runtime(&path.display().to_string(), e))?;
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| runtime("serializing output", e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Generates `count` traces into `out_dir` as `stream_<i>.csv`, with
/// stream `i` seeded `config.seed + i`. Returns the written paths.
pub fn cmd_generate(
    config: &SyntheticTraceConfig,
    count: usize,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    if count == 0 {
        return Err(CliError::Usage("count must be at least 1".into()));
    }
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| runtime(&out_dir.display().to_string(), e))?;

    let mut paths = Vec::with_capacity(count);
    for i in 0..count {
        let stream_config = SyntheticTraceConfig {
            seed: config.seed.wrapping_add(i as u64),
            ..config.clone()
        };
        let trace = stream_config.generate(format!("stream_{i}"))?;
        let mut bytes = Vec::new();
        trace.write_csv(&mut bytes).map_err(|e| runtime("encoding trace", e))?;
        let path = out_dir.join(format!("stream_{i}.csv"));
        write_atomic(&path, &bytes)?;
        paths.push(path);
    }
    Ok(paths)
}

/// One line of the slice-modification log emitted by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosLogEntry {
    pub interval_index: u64,
    pub requested_gbr: f64,
    pub granted_gbr: f64,
    /// Per-stream requests this modification aggregated.
    pub per_stream: BTreeMap<String, f64>,
}

fn qos_log_lines(result: &SimulationResult) -> Result<Vec<u8>, CliError> {
    let mut bytes = Vec::new();
    for request in &result.aggregate.requests {
        let k = request.interval_index as usize;
        let per_stream = result
            .per_stream
            .iter()
            .map(|(id, report)| (id.clone(), report.predictions[k].requested_gbr))
            .collect();
        let entry = QosLogEntry {
            interval_index: request.interval_index,
            requested_gbr: request.requested_gbr,
            granted_gbr: request.granted_gbr,
            per_stream,
        };
        serde_json::to_writer(&mut bytes, &entry).map_err(|e| runtime("encoding QoS log", e))?;
        bytes.push(b'\n');
    }
    Ok(bytes)
}

/// Replays `trace_paths` under `config`, writes the result JSON to
/// `out`, and optionally a JSON-lines QoS log of every slice
/// modification.
pub fn cmd_simulate(
    trace_paths: &[PathBuf],
    config: &SimConfig,
    out: &Path,
    qos_log: Option<&Path>,
) -> Result<SimulationResult, CliError> {
    let traces = load_traces(trace_paths)?;
    let result = run_simulation(&traces, config)?;
    write_atomic(out, &to_pretty_json(&result)?)?;
    if let Some(log_path) = qos_log {
        write_atomic(log_path, &qos_log_lines(&result)?)?;
    }
    Ok(result)
}

/// Per-technique summary row of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TechniqueSummary {
    pub total_cost: f64,
    pub over_magnitude: f64,
    pub over_count: u64,
    pub under_magnitude: f64,
    pub under_count: u64,
    pub savings_vs_static: f64,
    pub data_loss_bits: f64,
}

/// Outcome of replaying the same traces under several techniques.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema_version: String,
    pub techniques: BTreeMap<String, TechniqueSummary>,
    /// Technique names by ascending total cost, ties broken by name.
    pub ranking: Vec<String>,
}

const PLOT_METRICS: [&str; 7] = [
    "total_cost",
    "over_magnitude",
    "over_count",
    "under_magnitude",
    "under_count",
    "savings_vs_static",
    "data_loss_bits",
];

fn plot_csv_bytes(report: &CompareReport) -> Vec<u8> {
    let mut out = String::from("technique,metric,value\n");
    for (name, summary) in &report.techniques {
        for metric in PLOT_METRICS {
            let value = match metric {
                "total_cost" => summary.total_cost.to_string(),
                "over_magnitude" => summary.over_magnitude.to_string(),
                "over_count" => summary.over_count.to_string(),
                "under_magnitude" => summary.under_magnitude.to_string(),
                "under_count" => summary.under_count.to_string(),
                "savings_vs_static" => summary.savings_vs_static.to_string(),
                "data_loss_bits" => summary.data_loss_bits.to_string(),
                _ => unreachable!(),
            };
            out.push_str(&format!("{name},{metric},{value}\n"));
        }
    }
    out.into_bytes()
}

/// Expands the per-interval grants of `result` into the post-warmup
/// per-sample reservation series that savings are measured on.
fn granted_sample_series(result: &SimulationResult, samples: usize, spi: usize) -> Vec<f64> {
    let warmup = result.config.warmup_intervals as usize;
    let mut series = Vec::new();
    for request in &result.aggregate.requests {
        let k = request.interval_index as usize;
        if k < warmup {
            continue;
        }
        let start = k * spi;
        let end = samples.min(start + spi);
        series.extend(std::iter::repeat_n(request.granted_gbr, end.saturating_sub(start)));
    }
    series
}

/// Replays the same traces under every requested technique (at least
/// two), writes a ranked [`CompareReport`] to `out` and a long-format
/// `technique,metric,value` CSV to `plot_csv`.
pub fn cmd_compare(
    trace_paths: &[PathBuf],
    base_config: &SimConfig,
    techniques: &[Technique],
    out: &Path,
    plot_csv: &Path,
) -> Result<CompareReport, CliError> {
    let distinct: BTreeSet<Technique> = techniques.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(CliError::Usage(format!(
            "compare needs at least two distinct techniques, got {}",
            distinct.len()
        )));
    }

    let traces = load_traces(trace_paths)?;
    // The worst-case reservation every technique is measured against.
    let static_gbr = crate::numeric::kahan_sum(traces.iter().map(|t| t.stats().max_bps));
    let samples = traces[0].len();
    let spi = (base_config.interval / traces[0].sampling_period()).round() as usize;

    let mut summaries = BTreeMap::new();
    for technique in distinct {
        let mut config = base_config.clone();
        config.predictor.technique = technique;
        let result = run_simulation(&traces, &config)?;
        let granted = granted_sample_series(&result, samples, spi.max(1));
        let subscription = &result.aggregate.subscription;
        summaries.insert(
            technique.name().to_string(),
            TechniqueSummary {
                total_cost: subscription.total_cost,
                over_magnitude: subscription.over_magnitude,
                over_count: subscription.over_count,
                under_magnitude: subscription.under_magnitude,
                under_count: subscription.under_count,
                savings_vs_static: cost::bandwidth_savings(&granted, static_gbr)?,
                data_loss_bits: result.aggregate.data_loss_bits,
            },
        );
    }

    let mut ranking: Vec<String> = summaries.keys().cloned().collect();
    ranking.sort_by(|a, b| {
        summaries[a]
            .total_cost
            .partial_cmp(&summaries[b].total_cost)
            .expect("total costs are finite")
            .then_with(|| a.cmp(b))
    });

    let report = CompareReport {
        schema_version: crate::sim::SCHEMA_VERSION.to_string(),
        techniques: summaries,
        ranking,
    };
    write_atomic(out, &to_pretty_json(&report)?)?;
    write_atomic(plot_csv, &plot_csv_bytes(&report))?;
    Ok(report)
}
