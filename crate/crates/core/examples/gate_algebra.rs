//! Building a gate matrix, recovering its parameters and factoring it into
//! Z layers around the fundamental entangler.

use meadd::gate_algebra::{
    build_two_qubit, extract_params, kak_compose, kak_decompose, parity_decompose,
};
use meadd::linalg::phase_aligned_distance;
use meadd::GateParams;

fn main() -> meadd::Result<()> {
    let p = GateParams::new(0.7, 0.3, -1.1, 2.0, 0.4);
    let u = build_two_qubit(&p);
    let recovered = extract_params(&u)?;
    println!("input     {:?}", p.canonical());
    println!(
        "recovered {:?} (chi defined: {})",
        recovered.params, recovered.chi_defined
    );

    let parity = parity_decompose(&u)?;
    println!(
        "parity sectors reassemble to within {:.1e}",
        (parity.reassemble() - u).norm()
    );

    let kak = kak_decompose(&p);
    println!(
        "entangler (theta, phi) = ({:.3}, {:.3}); Z layers match to {:.1e} up to phase",
        kak.entangler.0,
        kak.entangler.1,
        phase_aligned_distance(&kak_compose(&kak), &u)
    );
    Ok(())
}
