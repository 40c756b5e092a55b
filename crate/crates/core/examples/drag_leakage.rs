//! Leakage into the second excited level for a plain and a DRAG π pulse as the
//! anharmonicity grows.

use meadd::pulses::{
    geometric_grid, leakage_scan, power_law_exponent, PulseEnvelope, DEFAULT_STEPS,
};
use std::f64::consts::PI;

fn main() -> meadd::Result<()> {
    let etas = geometric_grid(14.0, 40.0, 7);
    let points = leakage_scan(&PulseEnvelope::new(PI), &etas, DEFAULT_STEPS)?;
    println!(
        "{:>8} {:>12} {:>12} {:>10}",
        "etaT", "plain", "drag", "ratio"
    );
    for p in &points {
        println!(
            "{:>8.2} {:>12.3e} {:>12.3e} {:>10.3}",
            p.eta,
            p.plain_from_zero,
            p.drag_from_zero,
            p.suppression_ratio()
        );
    }
    let drag: Vec<f64> = points.iter().map(|p| p.drag_from_zero).collect();
    println!(
        "DRAG leakage scales as etaT^{:.2}",
        power_law_exponent(&etas, &drag)?
    );
    Ok(())
}
