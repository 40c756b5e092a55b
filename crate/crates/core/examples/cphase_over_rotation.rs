//! Controlled-phase estimate under X⊗X decoupling while one qubit's π pulses
//! are over-rotated.

use meadd::circuits::{run_cphase_family, FamilyOptions};
use meadd::estimation::{determinant_phase_series, estimate_phi, names};
use meadd::noise::{over_rotation_eps, NoiseConfig};
use meadd::GateParams;
use std::f64::consts::PI;

fn main() -> meadd::Result<()> {
    let gate = GateParams::new(0.0, 0.0, 0.0, PI - 0.01, 0.0);
    let depths: Vec<usize> = (1..=7).map(|k| 2 * k).collect();
    for fraction in [0.0, 0.02, 0.05, 0.1] {
        let noise = NoiseConfig {
            mw_error_left: over_rotation_eps(fraction),
            ..NoiseConfig::exact()
        };
        let records = run_cphase_family(&gate, &noise, &depths, &FamilyOptions::default())?;
        let fit = estimate_phi(&records)?;
        let phi = fit.get(names::PHI).unwrap_or(f64::NAN);
        println!(
            "over-rotation {:>4.0}%: phi error {:.2e}, residual rms {:.2e}",
            fraction * 100.0,
            (phi - gate.phi).abs(),
            fit.fit_residual_rms
        );
        if fraction == 0.1 {
            for (depth, angle) in determinant_phase_series(&records)? {
                println!("    depth {depth:>2}: arg det {angle:+.5}");
            }
        }
    }
    Ok(())
}
