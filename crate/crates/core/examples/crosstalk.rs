//! Parasitic swap coupling between idle qubits, amplified by XY4 decoupling
//! over long sequences.

use meadd::circuits::{run_crosstalk_family, FamilyOptions, SwapAxis};
use meadd::estimation::{estimate_theta_chi, names, SwapOptions};
use meadd::noise::NoiseConfig;

fn main() -> meadd::Result<()> {
    let (theta, chi, zeta) = (4.2e-4, 0.7, 0.5);
    let noise = NoiseConfig {
        shots: 2000,
        lambda1: 1e-3,
        zeta_drift_std: 0.05,
        seed: 9,
        ..NoiseConfig::default()
    };
    let depths: Vec<usize> = (1..=10).map(|k| 40 * k).collect();
    let mut estimates = Vec::new();
    for realization in 0..10 {
        let opts = FamilyOptions::default().realization(realization);
        let x = run_crosstalk_family(theta, chi, zeta, &noise, &depths, SwapAxis::X, &opts)?;
        let y = run_crosstalk_family(theta, chi, zeta, &noise, &depths, SwapAxis::Y, &opts)?;
        let fit = estimate_theta_chi(&x, &y, &SwapOptions::default())?;
        estimates.push(fit.get(names::THETA).unwrap_or(f64::NAN));
    }
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let std = (estimates.iter().map(|t| (t - mean).powi(2)).sum::<f64>()
        / (estimates.len() - 1) as f64)
        .sqrt();
    println!(
        "coupling {:.4} ± {:.4} mrad (true {:.4})",
        mean * 1e3,
        std * 1e3,
        theta * 1e3
    );
    Ok(())
}
