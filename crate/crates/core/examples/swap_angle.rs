//! Swap angle and azimuth from the X⊗X and Y⊗X families, repeated over
//! independent shot-noise realizations.

use meadd::circuits::{run_swap_family, FamilyOptions, SwapAxis};
use meadd::estimation::{estimate_theta_chi, names, SwapOptions};
use meadd::noise::NoiseConfig;
use meadd::GateParams;

fn main() -> meadd::Result<()> {
    let gate = GateParams::new(0.05, 0.0, 0.4, 0.0, 0.0);
    let noise = NoiseConfig::with_shots(1000, 7);
    let depths: Vec<usize> = (1..=7).map(|k| 2 * k).collect();
    let mut thetas = Vec::new();
    for realization in 0..20 {
        let opts = FamilyOptions::default().realization(realization);
        let x = run_swap_family(&gate, &noise, &depths, SwapAxis::X, &opts)?;
        let y = run_swap_family(&gate, &noise, &depths, SwapAxis::Y, &opts)?;
        let fit = estimate_theta_chi(&x, &y, &SwapOptions::default())?;
        thetas.push(fit.get(names::THETA).unwrap_or(f64::NAN));
        if realization == 0 {
            println!(
                "first realization: theta {:.5}, chi {:.4}",
                fit.get(names::THETA).unwrap_or(f64::NAN),
                fit.get(names::CHI).unwrap_or(f64::NAN)
            );
        }
    }
    let mean = thetas.iter().sum::<f64>() / thetas.len() as f64;
    let var = thetas.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (thetas.len() - 1) as f64;
    println!(
        "theta over 20 realizations: {mean:.5} ± {:.1e} (true {})",
        var.sqrt(),
        gate.theta
    );
    Ok(())
}
