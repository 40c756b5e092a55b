//! First-order robustness of common gates under X⊗X and XY4 decoupling.

use meadd::circuits::DdSequence;
use meadd::robustness::{robustness_verdict, VerdictOptions};
use meadd::GateParams;

fn main() {
    let gates = [
        ("cz", GateParams::cz()),
        ("sqrt-iswap", GateParams::sqrt_iswap()),
        ("iswap", GateParams::iswap()),
    ];
    println!(
        "{:<12} {:<5} {:<6} {:>6} {:>8}",
        "gate", "dd", "idle", "robust", "cycles"
    );
    for (name, gate) in gates {
        for dd in [DdSequence::Xx, DdSequence::Xy4] {
            for alternating_idle in [false, true] {
                let opts = VerdictOptions {
                    alternating_idle,
                    ..VerdictOptions::default()
                };
                let report = robustness_verdict(&gate, dd, opts);
                let cycles = report
                    .min_cancel_cycles
                    .map_or("-".to_string(), |n| n.to_string());
                println!(
                    "{name:<12} {:<5} {:<6} {:>6} {cycles:>8}{}",
                    format!("{dd:?}").to_lowercase(),
                    alternating_idle,
                    report.robust,
                    if report.flipped_degeneracies.is_empty() {
                        ""
                    } else {
                        "  (echo flipped)"
                    }
                );
            }
        }
    }
}
