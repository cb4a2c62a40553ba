//! Drive one predictor by hand, interval by interval, and watch how
//! the deviation-tracking technique shifts its requests: above the
//! last peak while demand keeps breaking through, below it once the
//! requests run ahead of demand.

use slicecast::{Predictor, PredictorConfig, SyntheticTraceConfig, Technique};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trace = SyntheticTraceConfig {
        duration: 1800.0,
        diurnal_period: 900.0, // fast cycles make the trend visible
        diurnal_amplitude: 3e6,
        burst_rate: 0.0,
        noise_stddev: 5e4,
        ..Default::default()
    }
    .generate("cam_0")?;

    let config = PredictorConfig {
        initial_gbr: Some(6e6),
        ..PredictorConfig::new(Technique::ModifiedMax)
    };
    let mut predictor = Predictor::for_trace(config, &trace)?;

    let interval_samples = 60; // re-request every minute of 1 s samples
    println!("{:>8} {:>14} {:>14} {:>10}", "interval", "requested_bps", "peak_bps", "verdict");
    for (k, chunk) in trace.samples().chunks(interval_samples).enumerate() {
        let requested = predictor.current_request();
        let rates: Vec<f64> = chunk.iter().map(|s| s.bitrate_bps).collect();
        let peak = rates.iter().cloned().fold(f64::MIN, f64::max);
        let verdict = if peak > requested { "over" } else { "covered" };
        println!("{k:>8} {requested:>14.0} {peak:>14.0} {verdict:>10}");
        predictor.observe_interval(&rates)?;
    }
    Ok(())
}
