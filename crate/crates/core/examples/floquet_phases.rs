//! Single-qubit phases ζ and γ of the bare gate, given the swap angle.

use meadd::circuits::{run_floquet_family, FamilyOptions};
use meadd::estimation::{estimate_z_phases, names};
use meadd::noise::NoiseConfig;
use meadd::GateParams;

fn main() -> meadd::Result<()> {
    let gate = GateParams::new(0.3, 0.25, 0.0, 0.8, -0.1);
    let depths: Vec<usize> = (1..=8).collect();
    for (label, noise) in [
        ("exact", NoiseConfig::exact()),
        ("2000 shots", NoiseConfig::with_shots(2000, 3)),
    ] {
        let records = run_floquet_family(&gate, &noise, &depths, &FamilyOptions::default())?;
        let fit = estimate_z_phases(&records, gate.theta)?;
        println!(
            "{label:>10}: zeta {:.5} (true {}), gamma {:.5} (true {})",
            fit.get(names::ZETA).unwrap_or(f64::NAN),
            gate.zeta,
            fit.get(names::GAMMA).unwrap_or(f64::NAN),
            gate.gamma
        );
    }
    Ok(())
}
