//! Score two reservation ledgers that miss by the same magnitude in
//! opposite directions. Dropped traffic is penalized 300 times harder
//! than idle reservation under the default penalties, which is the
//! whole reason conservative over-reservation wins so often.

use slicecast::{classic_metrics, subscription_metrics, CostParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let actual = vec![10.0, 12.0, 11.0, 13.0];
    let too_high = vec![12.0, 14.0, 13.0, 15.0]; // +2 everywhere: idle reservation
    let too_low = vec![8.0, 10.0, 9.0, 11.0]; // -2 everywhere: dropped traffic

    let params = CostParams::default();
    println!("penalties: p_u={} per idle bit, p_o={} per dropped bit\n", params.p_u, params.p_o);

    for (label, gbr) in [("2 Mbit/s too high", &too_high), ("2 Mbit/s too low", &too_low)] {
        let sub = subscription_metrics(&actual, gbr, &params)?;
        let classic = classic_metrics(&actual, gbr)?;
        println!("{label}:");
        println!(
            "  over {} samples ({} bits), under {} samples ({} bits)",
            sub.over_count, sub.over_magnitude, sub.under_count, sub.under_magnitude
        );
        println!("  total cost {}  (identical mae {}, rmse {:.4})", sub.total_cost, classic.mae, classic.rmse);
        println!();
    }
    Ok(())
}
