//! Signal-to-noise of the swap-angle estimate against detuning for the
//! amplified protocol and two baselines at matched budgets.

use meadd::estimation::{snr_scan, Protocol, SnrConfig};

fn main() -> meadd::Result<()> {
    let cfg = SnrConfig {
        realizations: 40,
        ..SnrConfig::default()
    };
    let theta = 0.03;
    let grid: Vec<(f64, f64)> = [0.0, 1.0, 5.0, 10.0]
        .iter()
        .map(|r| (theta, r * theta))
        .collect();
    println!("{:<20} {:>8} {:>8}", "protocol", "zeta", "snr");
    for protocol in [
        Protocol::Meadd,
        Protocol::PhaseMethod,
        Protocol::UnitaryTomography,
    ] {
        for row in snr_scan(protocol, &grid, &cfg)? {
            println!("{:<20} {:>8.3} {:>8.1}", protocol.name(), row.zeta, row.snr);
        }
    }
    Ok(())
}
