//! Generate a small suite of synthetic bandwidth traces and print
//! their stats. The same config + seed always produces byte-identical
//! CSV files, so suites can be regenerated instead of checked in.

use slicecast::cli::cmd_generate;
use slicecast::SyntheticTraceConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = SyntheticTraceConfig {
        duration: 3600.0,       // one hour at the default 1 s sampling
        diurnal_period: 1800.0, // two full demand cycles in that hour
        diurnal_amplitude: 2e6,
        burst_rate: 12.0, // frequent bursts so a short trace shows some
        ..Default::default()
    };

    let out_dir = std::env::temp_dir().join("slicecast-generate-demo");
    let paths = cmd_generate(&config, 4, &out_dir)?;
    println!("wrote {} traces to {}", paths.len(), out_dir.display());

    for path in &paths {
        let file = std::fs::File::open(path)?;
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let trace = slicecast::BandwidthTrace::parse_csv(file, stem)?;
        let stats = trace.stats();
        println!(
            "{}: {} samples, min {:.0} bps, mean {:.0} bps, max {:.0} bps",
            trace.stream_id(),
            stats.sample_count,
            stats.min_bps,
            stats.mean_bps,
            stats.max_bps,
        );
    }
    Ok(())
}
