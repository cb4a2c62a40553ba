//! Bandwidth traces: CSV ingestion, resampling, synthesis, and stats.
//!
//! A trace is one stream's bit rate over time, sampled at integer
//! millisecond timestamps. Parsed traces may be irregular; the simulator
//! requires a uniform grid, which [`BandwidthTrace::resample`] produces
//! by carrying the last observation forward.
//!
//! The CSV format is two columns with a fixed header:
//!
//! ```text
//! timestamp_ms,bitrate_bps
//! 0,5000000
//! 1000,5012345.678
//! ```

use std::io::{BufRead, BufReader, Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::KahanSum;

/// Gaps wider than this multiple of the sampling period fail the parse;
/// carrying one value across such a hole would fabricate load.
const MAX_GAP_PERIODS: i64 = 100;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace has no samples")]
    Empty,
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: negative bitrate")]
    NegativeBitrate { line: usize },
    #[error("line {line}: duplicate timestamp {timestamp_ms} ms")]
    DuplicateTimestamp { line: usize, timestamp_ms: i64 },
    #[error(
        "line {line}: gap of {gap_ms} ms exceeds {MAX_GAP_PERIODS}x the {period_ms} ms sampling period"
    )]
    ExcessiveGap { line: usize, gap_ms: i64, period_ms: i64 },
    #[error("sampling period {0} s is not a positive whole number of milliseconds")]
    InvalidPeriod(f64),
    #[error("invalid trace: {0}")]
    InvalidSamples(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

/// One observation of a stream's bit rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSample {
    /// Integer milliseconds since the epoch.
    pub timestamp_ms: i64,
    /// Non-negative bits per second.
    pub bitrate_bps: f64,
}

/// A single stream's bandwidth history.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthTrace {
    stream_id: String,
    sampling_period: f64,
    samples: Vec<BandwidthSample>,
}

/// Extremes and mean of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStats {
    pub min_bps: f64,
    pub max_bps: f64,
    pub mean_bps: f64,
    pub sample_count: usize,
}

/// Converts a sampling period in seconds to whole milliseconds,
/// rejecting sub-millisecond or fractional-millisecond periods that the
/// integer timestamp grid cannot represent.
fn period_to_ms(period: f64) -> Result<i64, TraceError> {
    if !period.is_finite() || period <= 0.0 {
        return Err(TraceError::InvalidPeriod(period));
    }
    let ms = (period * 1000.0).round();
    if ms < 1.0 || (period * 1000.0 - ms).abs() > 1e-6 {
        return Err(TraceError::InvalidPeriod(period));
    }
    Ok(ms as i64)
}

impl BandwidthTrace {
    /// Builds a trace, enforcing non-emptiness, strictly increasing
    /// timestamps, finite non-negative bitrates, and a whole-millisecond
    /// sampling period.
    pub fn new(
        stream_id: impl Into<String>,
        sampling_period: f64,
        samples: Vec<BandwidthSample>,
    ) -> Result<Self, TraceError> {
        period_to_ms(sampling_period)?;
        if samples.is_empty() {
            return Err(TraceError::Empty);
        }
        for pair in samples.windows(2) {
            if pair[1].timestamp_ms <= pair[0].timestamp_ms {
                return Err(TraceError::InvalidSamples(format!(
                    "timestamps not strictly increasing at {} ms",
                    pair[1].timestamp_ms
                )));
            }
        }
        for s in &samples {
            if !s.bitrate_bps.is_finite() || s.bitrate_bps < 0.0 {
                return Err(TraceError::InvalidSamples(format!(
                    "bitrate {} at {} ms",
                    s.bitrate_bps, s.timestamp_ms
                )));
            }
        }
        Ok(Self { stream_id: stream_id.into(), sampling_period, samples })
    }

    pub fn stream_id(&self) -> &str {
        &self.stream_id
    }

    /// Sampling period in seconds.
    pub fn sampling_period(&self) -> f64 {
        self.sampling_period
    }

    pub fn samples(&self) -> &[BandwidthSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// True when consecutive timestamps all differ by exactly the
    /// sampling period, which the simulator requires.
    pub fn is_uniform(&self) -> bool {
        let Ok(period_ms) = period_to_ms(self.sampling_period) else {
            return false;
        };
        self.samples
            .windows(2)
            .all(|p| p[1].timestamp_ms - p[0].timestamp_ms == period_ms)
    }

    /// Parses the two-column CSV format. Rows may arrive unsorted; the
    /// sampling period is inferred from the smallest timestamp gap
    /// (1 s for a single-row trace).
    pub fn parse_csv<R: Read>(reader: R, stream_id: impl Into<String>) -> Result<Self, TraceError> {
        let mut lines = BufReader::new(reader).lines();
        let header = match lines.next() {
            Some(h) => h?,
            None => return Err(TraceError::Empty),
        };
        if header.trim_end_matches('\r') != "timestamp_ms,bitrate_bps" {
            return Err(TraceError::MalformedRow {
                line: 1,
                reason: format!("expected header \"timestamp_ms,bitrate_bps\", got \"{header}\""),
            });
        }

        // (timestamp, bitrate, source line) so sorting keeps diagnostics honest.
        let mut rows: Vec<(i64, f64, usize)> = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let raw = line?;
            let text = raw.trim_end_matches('\r');
            if text.is_empty() {
                continue;
            }
            let mut fields = text.split(',');
            let (Some(ts), Some(rate), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(TraceError::MalformedRow {
                    line: line_no,
                    reason: "expected exactly two comma-separated fields".into(),
                });
            };
            let timestamp_ms: i64 = ts.trim().parse().map_err(|e| TraceError::MalformedRow {
                line: line_no,
                reason: format!("bad timestamp \"{ts}\": {e}"),
            })?;
            let bitrate_bps: f64 = rate.trim().parse().map_err(|e| TraceError::MalformedRow {
                line: line_no,
                reason: format!("bad bitrate \"{rate}\": {e}"),
            })?;
            if !bitrate_bps.is_finite() {
                return Err(TraceError::MalformedRow {
                    line: line_no,
                    reason: format!("non-finite bitrate \"{rate}\""),
                });
            }
            if bitrate_bps < 0.0 {
                return Err(TraceError::NegativeBitrate { line: line_no });
            }
            rows.push((timestamp_ms, bitrate_bps, line_no));
        }
        if rows.is_empty() {
            return Err(TraceError::Empty);
        }

        rows.sort_by_key(|r| r.0);
        for pair in rows.windows(2) {
            if pair[1].0 == pair[0].0 {
                return Err(TraceError::DuplicateTimestamp {
                    line: pair[1].2,
                    timestamp_ms: pair[1].0,
                });
            }
        }

        let min_gap_ms = rows.windows(2).map(|p| p[1].0 - p[0].0).min().unwrap_or(1000);
        for pair in rows.windows(2) {
            let gap = pair[1].0 - pair[0].0;
            if gap > MAX_GAP_PERIODS * min_gap_ms {
                return Err(TraceError::ExcessiveGap {
                    line: pair[1].2,
                    gap_ms: gap,
                    period_ms: min_gap_ms,
                });
            }
        }

        let samples = rows
            .into_iter()
            .map(|(timestamp_ms, bitrate_bps, _)| BandwidthSample { timestamp_ms, bitrate_bps })
            .collect();
        Self::new(stream_id, min_gap_ms as f64 / 1000.0, samples)
    }

    /// Writes the two-column CSV format with LF line endings. Bitrates
    /// use the shortest decimal form that parses back to the same f64,
    /// so write/parse round-trips are exact and byte-stable.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(b"timestamp_ms,bitrate_bps\n")?;
        for s in &self.samples {
            writeln!(writer, "{},{}", s.timestamp_ms, s.bitrate_bps)?;
        }
        Ok(())
    }

    /// Resamples onto a uniform grid that starts at the first timestamp
    /// and extends in `period` steps until it covers the last one. Each
    /// grid point takes the most recent value at or before it.
    pub fn resample(&self, period: f64) -> Result<Self, TraceError> {
        let period_ms = period_to_ms(period)?;
        let first = self.samples[0].timestamp_ms;
        let span = self.samples.last().unwrap().timestamp_ms - first;
        let steps = span.div_euclid(period_ms) + i64::from(span.rem_euclid(period_ms) != 0);

        let mut resampled = Vec::with_capacity(steps as usize + 1);
        let mut idx = 0;
        for step in 0..=steps {
            let at = first + step * period_ms;
            while idx + 1 < self.samples.len() && self.samples[idx + 1].timestamp_ms <= at {
                idx += 1;
            }
            resampled.push(BandwidthSample {
                timestamp_ms: at,
                bitrate_bps: self.samples[idx].bitrate_bps,
            });
        }
        Self::new(self.stream_id.clone(), period, resampled)
    }

    /// Exact min/max and compensated mean.
    pub fn stats(&self) -> TraceStats {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = KahanSum::new();
        for s in &self.samples {
            min = min.min(s.bitrate_bps);
            max = max.max(s.bitrate_bps);
            sum.add(s.bitrate_bps);
        }
        TraceStats {
            min_bps: min,
            max_bps: max,
            mean_bps: sum.value() / self.samples.len() as f64,
            sample_count: self.samples.len(),
        }
    }
}

/// Parameters for the synthetic trace generator:
///
/// ```text
/// bitrate(t) = max(0, base_rate
///                     + diurnal_amplitude * sin(2*pi*t / diurnal_period)
///                     + bursts(t)
///                     + noise(t))
/// ```
///
/// Bursts are rectangular pulses of `burst_magnitude` lasting
/// `burst_duration`, placed by a Poisson process at `burst_rate` per
/// hour; noise is zero-mean Gaussian. Both draw from a ChaCha stream
/// seeded with `seed`, so a config fully determines its trace. Times are
/// in seconds, rates in bits per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticTraceConfig {
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_sampling_period")]
    pub sampling_period: f64,
    #[serde(default = "default_base_rate")]
    pub base_rate: f64,
    #[serde(default = "default_diurnal_amplitude")]
    pub diurnal_amplitude: f64,
    #[serde(default = "default_diurnal_period")]
    pub diurnal_period: f64,
    /// Expected bursts per hour.
    #[serde(default = "default_burst_rate")]
    pub burst_rate: f64,
    #[serde(default = "default_burst_magnitude")]
    pub burst_magnitude: f64,
    #[serde(default = "default_burst_duration")]
    pub burst_duration: f64,
    #[serde(default = "default_noise_stddev")]
    pub noise_stddev: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_duration() -> f64 {
    86_400.0
}
fn default_sampling_period() -> f64 {
    1.0
}
fn default_base_rate() -> f64 {
    5e6
}
fn default_diurnal_amplitude() -> f64 {
    2e6
}
fn default_diurnal_period() -> f64 {
    86_400.0
}
fn default_burst_rate() -> f64 {
    1.0
}
fn default_burst_magnitude() -> f64 {
    2e6
}
fn default_burst_duration() -> f64 {
    60.0
}
fn default_noise_stddev() -> f64 {
    2e5
}
fn default_seed() -> u64 {
    42
}

impl Default for SyntheticTraceConfig {
    fn default() -> Self {
        Self {
            duration: default_duration(),
            sampling_period: default_sampling_period(),
            base_rate: default_base_rate(),
            diurnal_amplitude: default_diurnal_amplitude(),
            diurnal_period: default_diurnal_period(),
            burst_rate: default_burst_rate(),
            burst_magnitude: default_burst_magnitude(),
            burst_duration: default_burst_duration(),
            noise_stddev: default_noise_stddev(),
            seed: default_seed(),
        }
    }
}

impl SyntheticTraceConfig {
    pub fn validate(&self) -> Result<(), TraceError> {
        let non_negative = [
            ("base_rate", self.base_rate),
            ("diurnal_amplitude", self.diurnal_amplitude),
            ("burst_rate", self.burst_rate),
            ("burst_magnitude", self.burst_magnitude),
            ("burst_duration", self.burst_duration),
            ("noise_stddev", self.noise_stddev),
        ];
        for (name, value) in non_negative {
            if !value.is_finite() || value < 0.0 {
                return Err(TraceError::InvalidConfig(format!("{name} must be >= 0, got {value}")));
            }
        }
        if !self.diurnal_period.is_finite() || self.diurnal_period <= 0.0 {
            return Err(TraceError::InvalidConfig(format!(
                "diurnal_period must be > 0, got {}",
                self.diurnal_period
            )));
        }
        period_to_ms(self.sampling_period)?;
        if !self.duration.is_finite() || self.duration < self.sampling_period {
            return Err(TraceError::InvalidConfig(format!(
                "duration {} must cover at least one sampling period {}",
                self.duration, self.sampling_period
            )));
        }
        Ok(())
    }

    /// Generates the trace this config describes. Output bitrates are
    /// rounded to whole bits/s: sub-bps resolution means nothing for
    /// traffic at this scale, and the wide quantum absorbs last-ulp
    /// libm differences so the emitted CSV is byte-stable across
    /// platforms, not just across runs.
    pub fn generate(&self, stream_id: impl Into<String>) -> Result<BandwidthTrace, TraceError> {
        self.validate()?;
        let period_ms = period_to_ms(self.sampling_period)?;
        let duration_ms = (self.duration * 1000.0).round() as i64;
        let count = (duration_ms / period_ms) as usize;

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let mut bursts: Vec<(f64, f64)> = Vec::new();
        if self.burst_rate > 0.0 {
            let inter_arrival = Exp::new(self.burst_rate / 3600.0)
                .map_err(|e| TraceError::InvalidConfig(format!("burst_rate: {e}")))?;
            let mut at = inter_arrival.sample(&mut rng);
            while at < self.duration {
                bursts.push((at, at + self.burst_duration));
                at += inter_arrival.sample(&mut rng);
            }
        }
        let noise = if self.noise_stddev > 0.0 {
            Some(
                Normal::new(0.0, self.noise_stddev)
                    .map_err(|e| TraceError::InvalidConfig(format!("noise_stddev: {e}")))?,
            )
        } else {
            None
        };

        let mut samples = Vec::with_capacity(count);
        for i in 0..count {
            let timestamp_ms = i as i64 * period_ms;
            let t = timestamp_ms as f64 / 1000.0;
            let mut rate = self.base_rate
                + self.diurnal_amplitude * (std::f64::consts::TAU * t / self.diurnal_period).sin();
            for &(start, end) in &bursts {
                if t >= start && t < end {
                    rate += self.burst_magnitude;
                }
            }
            if let Some(noise) = &noise {
                rate += noise.sample(&mut rng);
            }
            samples.push(BandwidthSample { timestamp_ms, bitrate_bps: rate.max(0.0).round() });
        }
        BandwidthTrace::new(stream_id, self.sampling_period, samples)
    }
}
