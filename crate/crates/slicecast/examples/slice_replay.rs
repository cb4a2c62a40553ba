//! Replay two streams through a capacity-limited slice and inspect
//! the per-interval ledger: what was requested, what the controller
//! granted, and how much traffic the cap dropped.

use slicecast::{
    run_simulation, PredictorConfig, SimConfig, SyntheticTraceConfig, Technique,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = SyntheticTraceConfig {
        duration: 3600.0,
        diurnal_period: 1200.0,
        diurnal_amplitude: 2e6,
        noise_stddev: 1e5,
        ..Default::default()
    };
    let traces = vec![
        base.generate("cam_east")?,
        SyntheticTraceConfig { seed: base.seed + 1, ..base.clone() }.generate("cam_west")?,
    ];

    let config = SimConfig {
        interval: 120.0,
        // Tight enough that peak intervals hit the cap.
        slice_capacity: Some(1.3e7),
        ..SimConfig::new(PredictorConfig::new(Technique::Max))
    };
    let result = run_simulation(&traces, &config)?;

    println!("{:>8} {:>14} {:>14} {:>8}", "interval", "requested_bps", "granted_bps", "capped");
    for request in &result.aggregate.requests {
        let capped = if request.granted_gbr < request.requested_gbr { "yes" } else { "" };
        println!(
            "{:>8} {:>14.0} {:>14.0} {:>8}",
            request.interval_index, request.requested_gbr, request.granted_gbr, capped
        );
    }

    println!("\naggregate data loss: {:.0} bits", result.aggregate.data_loss_bits);
    for (stream, report) in &result.per_stream {
        println!(
            "{stream}: total cost {:.3e}, over {} / under {} samples",
            report.subscription.total_cost,
            report.subscription.over_count,
            report.subscription.under_count,
        );
    }
    Ok(())
}
