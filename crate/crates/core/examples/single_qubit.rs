//! Rotation angle and detuning of a single-qubit pulse, then the relative
//! axis between a π/2 and a π pulse.

use meadd::circuits::{run_relative_axis_family, run_single_qubit_family};
use meadd::estimation::{estimate_single_qubit, names};
use meadd::noise::NoiseConfig;
use meadd::SingleQubitParams;
use std::f64::consts::{FRAC_PI_2, PI};

fn main() -> meadd::Result<()> {
    let noise = NoiseConfig::with_shots(5000, 11);
    let depths: Vec<usize> = (1..=8).collect();
    let z_offsets = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

    let pulse = SingleQubitParams::new(FRAC_PI_2 + 0.01, 0.03, 0.0);
    let records = run_single_qubit_family(&pulse, None, &noise, &depths, &z_offsets, 0)?;
    let fit = estimate_single_qubit(&records)?;
    println!(
        "pulse: mu {:.5} (true {:.5}), zeta {:.5} (true {})",
        fit.get(names::MU).unwrap_or(f64::NAN),
        pulse.mu,
        fit.get(names::ZETA).unwrap_or(f64::NAN),
        pulse.zeta
    );

    let x_pi = SingleQubitParams::new(PI, 0.0, 0.02);
    let x_half = SingleQubitParams::new(-FRAC_PI_2, 0.0, -0.015);
    let records = run_relative_axis_family(&x_pi, &x_half, &noise, &depths, &z_offsets, 0)?;
    let fit = estimate_single_qubit(&records)?;
    println!(
        "relative axis: {:.5} (true {:.5})",
        fit.get(names::ZETA).unwrap_or(f64::NAN),
        x_half.chi - x_pi.chi
    );
    Ok(())
}
