//! Decoherence-limited variance of the phase and swap estimates against depth,
//! with a Monte Carlo check of the optimal depth.

use meadd::estimation::{
    optimal_depth_from_scan, simulate_swap_estimates, variance_bound, VarianceMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> meadd::Result<()> {
    let (lambda1, lambda2, shots) = (1e-3, 1e-3, 1000);
    let (_, nstar) = variance_bound(VarianceMode::TwoQubitSwap, lambda1, lambda2, shots, 1)?;
    println!("predicted optimal swap depth: {nstar:.1}");

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let depths = [200, 252, 317, 400, 504, 635, 800];
    let mut variances = Vec::new();
    for &n in &depths {
        let est = simulate_swap_estimates(0.05, n, shots, lambda1, lambda2, 5000, &mut rng)?;
        let mean = est.iter().sum::<f64>() / est.len() as f64;
        let var = est.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64;
        let (bound, _) = variance_bound(VarianceMode::TwoQubitSwap, lambda1, lambda2, shots, n)?;
        println!("n = {n:>3}: simulated {var:.3e}, bound {bound:.3e}");
        variances.push(var);
    }
    println!(
        "fitted optimal depth: {:.1}",
        optimal_depth_from_scan(&depths, &variances)?
    );
    Ok(())
}
