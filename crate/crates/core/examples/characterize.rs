//! Full five-parameter characterization of a noisy gate from sampled shots.

use meadd::circuits::FamilyOptions;
use meadd::estimation::{characterize, names, MeaddPlan};
use meadd::noise::NoiseConfig;
use meadd::GateParams;

fn main() -> meadd::Result<()> {
    let truth = GateParams::new(0.12, 0.4, 0.7, 1.3, 0.05);
    let noise = NoiseConfig {
        shots: 4000,
        seed: 42,
        zeta_drift_std: 0.01,
        ..NoiseConfig::default()
    };
    let fit = characterize(
        &truth,
        &noise,
        &MeaddPlan::default(),
        &FamilyOptions::default(),
    )?;
    let canonical = truth.canonical();
    let rows = [
        (names::THETA, canonical.theta),
        (names::PHI, canonical.phi),
        (names::ZETA, canonical.zeta),
        (names::CHI, canonical.chi),
        (names::GAMMA, canonical.gamma),
    ];
    println!(
        "{:>6} {:>10} {:>10} {:>10}",
        "param", "true", "estimate", "stderr"
    );
    for (name, value) in rows {
        println!(
            "{name:>6} {value:>10.5} {:>10.5} {:>10.2e}",
            fit.get(name).unwrap_or(f64::NAN),
            fit.std_error(name).unwrap_or(f64::NAN)
        );
    }
    println!("largest fit residual: {:.2e}", fit.fit_residual_rms);
    Ok(())
}
