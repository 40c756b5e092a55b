use meadd::circuits::{
    run_baseline_unitary_tomography, run_cphase_family, run_floquet_family,
    run_relative_axis_family, run_single_qubit_family, run_swap_family, DdSequence, FamilyOptions,
    Observable, Prep, Qubit, SwapAxis,
};
use meadd::gate_algebra::{build_single_qubit, build_two_qubit, GateParams, SingleQubitParams};
use meadd::linalg::{c, cis, wrap_angle, Mat2, Mat4, C64};
use meadd::noise::NoiseConfig;
use meadd::Error;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn xx() -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..4 {
        m[(3 - i, i)] = c(1.0, 0.0);
    }
    m
}

fn power(m: &Mat4, k: usize) -> Mat4 {
    (0..k).fold(Mat4::identity(), |acc, _| m * acc)
}

/// Coherence matrix from a state-vector picture: column `j` prepared as
/// `(|00> + |j>)/√2`, entry `(i, j)` is `2·ψ_i·conj(ψ_00)`.
fn coherence_oracle(u: &Mat4) -> Mat2 {
    let idx = [1usize, 2];
    let mut m = Mat2::zeros();
    for (col, &j) in idx.iter().enumerate() {
        for (row, &i) in idx.iter().enumerate() {
            m[(row, col)] = u[(i, j)] * u[(0, 0)].conj();
        }
    }
    m
}

fn random_gate(seed: u64) -> GateParams {
    let mut s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    GateParams::new(
        next() * FRAC_PI_2,
        (next() - 0.5) * 2.0 * PI,
        (next() - 0.5) * 2.0 * PI,
        (next() - 0.5) * 2.0 * PI,
        (next() - 0.5) * PI,
    )
}

#[test]
fn cphase_matrix_matches_dense_product() {
    for seed in 0..20 {
        let gate = random_gate(seed);
        let cycle = xx() * build_two_qubit(&gate);
        let depths = [2, 4, 10, 24];
        let records = run_cphase_family(
            &gate,
            &NoiseConfig::exact(),
            &depths,
            &FamilyOptions::default(),
        )
        .unwrap();
        for (rec, &k) in records.iter().zip(&depths) {
            let expected = coherence_oracle(&power(&cycle, k));
            assert!(
                (rec.matrix().unwrap() - expected).norm() < 1e-12,
                "seed {seed} depth {k}"
            );
        }
    }
}

#[test]
fn ideal_cz_has_unit_determinant() {
    let records = run_cphase_family(
        &GateParams::cz(),
        &NoiseConfig::exact(),
        &[2],
        &FamilyOptions::default(),
    )
    .unwrap();
    let det = records[0].matrix().unwrap().determinant();
    assert!((det - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn cphase_determinant_phase_winds_with_depth() {
    let phi = PI - 0.01;
    let gate = GateParams::new(0.0, 0.0, 0.0, phi, 0.0);
    let depths: Vec<usize> = (1..=10).map(|n| 2 * n).collect();
    let records = run_cphase_family(
        &gate,
        &NoiseConfig::exact(),
        &depths,
        &FamilyOptions::default(),
    )
    .unwrap();
    for rec in &records {
        let det = rec.matrix().unwrap().determinant();
        assert!((det.norm() - 1.0).abs() < 1e-12);
        let residual = wrap_angle(det.conj().arg() + rec.depth as f64 * phi);
        assert!(residual.abs() < 1e-12, "depth {}", rec.depth);
    }
}

#[test]
fn odd_depths_are_rejected() {
    let err = run_cphase_family(
        &GateParams::cz(),
        &NoiseConfig::exact(),
        &[2, 3],
        &FamilyOptions::default(),
    );
    assert!(matches!(err, Err(Error::OddDepth(3))));
    let err = run_swap_family(
        &GateParams::cz(),
        &NoiseConfig::exact(),
        &[5],
        SwapAxis::X,
        &FamilyOptions::default(),
    );
    assert!(matches!(err, Err(Error::OddDepth(5))));
}

#[test]
fn identity_gate_holds_swap_population() {
    let opts = FamilyOptions {
        swap_prep: Prep::One0,
        ..FamilyOptions::default()
    };
    let depths = [2, 8, 40];
    let records = run_swap_family(
        &GateParams::identity(),
        &NoiseConfig::exact(),
        &depths,
        SwapAxis::X,
        &opts,
    )
    .unwrap();
    for rec in &records {
        let z = rec.get(Prep::One0, Observable::ZOdd).unwrap().re;
        assert!((z + 1.0).abs() < 1e-12);
    }
}

#[test]
fn swap_bloch_vector_matches_dense_product() {
    for seed in 0..10 {
        let gate = random_gate(seed);
        for (axis, left) in [
            (
                SwapAxis::X,
                Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
            ),
            (
                SwapAxis::Y,
                Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
            ),
        ] {
            let right = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
            let dd = meadd::linalg::kron(&left, &right);
            let cycle = dd * build_two_qubit(&gate);
            let depths = [2, 6, 12];
            let records = run_swap_family(
                &gate,
                &NoiseConfig::exact(),
                &depths,
                axis,
                &FamilyOptions::default(),
            )
            .unwrap();
            for (rec, &k) in records.iter().zip(&depths) {
                let psi = power(&cycle, k).column(1).into_owned();
                let a = psi[1];
                let b = psi[2];
                let x = 2.0 * (a.conj() * b).re;
                let y = 2.0 * (a.conj() * b).im;
                let z = a.norm_sqr() - b.norm_sqr();
                let bloch = rec.bloch(Prep::Zero1).unwrap();
                assert!((bloch[0] - x).abs() < 1e-12, "x {seed} {axis:?} {k}");
                assert!((bloch[1] - y).abs() < 1e-12, "y {seed} {axis:?} {k}");
                assert!((bloch[2] - z).abs() < 1e-12, "z {seed} {axis:?} {k}");
            }
        }
    }
}

#[test]
fn small_swap_oscillates_at_twice_the_projected_angle() {
    let (theta, chi) = (0.002, 0.4);
    let gate = GateParams::new(theta, 0.0, chi, 0.0, 0.0);
    let depths: Vec<usize> = (1..=50).map(|n| 2 * n).collect();
    let records = run_swap_family(
        &gate,
        &NoiseConfig::exact(),
        &depths,
        SwapAxis::X,
        &FamilyOptions::default(),
    )
    .unwrap();
    for rec in &records {
        let z = rec.bloch(Prep::Zero1).unwrap()[2];
        let expected = (2.0 * rec.depth as f64 * theta * chi.cos()).cos();
        assert!((z - expected).abs() < 1e-4, "depth {}", rec.depth);
    }
}

#[test]
fn floquet_family_follows_bare_gate_powers() {
    let opts = FamilyOptions::default();
    let cz = run_floquet_family(&GateParams::cz(), &NoiseConfig::exact(), &[1, 3], &opts).unwrap();
    for rec in &cz {
        assert!((rec.matrix().unwrap() - Mat2::identity()).norm() < 1e-12);
    }

    let gamma = 0.05;
    let gate = GateParams::new(0.3, 0.2, 0.1, 0.0, gamma);
    let depths = [1, 2, 5, 9];
    for rec in run_floquet_family(&gate, &NoiseConfig::exact(), &depths, &opts).unwrap() {
        let det = rec.matrix().unwrap().determinant();
        let residual = wrap_angle(det.arg() + 2.0 * rec.depth as f64 * gamma);
        assert!(residual.abs() < 1e-12);
    }

    let zeta = 0.1;
    let gate = GateParams::new(0.0, zeta, 0.0, 0.0, 0.0);
    for rec in run_floquet_family(&gate, &NoiseConfig::exact(), &[1, 4, 7], &opts).unwrap() {
        let n = rec.depth as f64;
        let m = rec.matrix().unwrap();
        let expected = Mat2::new(cis(-n * zeta), c(0.0, 0.0), c(0.0, 0.0), cis(n * zeta));
        assert!((m - expected).norm() < 1e-12);
    }
}

#[test]
fn drift_echoes_out_of_cphase_determinant() {
    let gate = GateParams::new(0.2, 0.4, -0.3, 1.1, 0.2);
    let depths = [2, 4, 8, 16];
    let clean = run_cphase_family(
        &gate,
        &NoiseConfig::exact(),
        &depths,
        &FamilyOptions::default(),
    )
    .unwrap();
    let noisy = NoiseConfig {
        zeta_drift_std: 0.05,
        gamma_drift_std: 0.05,
        ..NoiseConfig::exact()
    };
    for realization in 0..5 {
        let opts = FamilyOptions {
            realization,
            ..FamilyOptions::default()
        };
        let drifted = run_cphase_family(&gate, &noisy, &depths, &opts).unwrap();
        for (a, b) in clean.iter().zip(&drifted) {
            let da = a.matrix().unwrap().determinant();
            let db = b.matrix().unwrap().determinant();
            assert!(
                (da - db).norm() < 1e-12,
                "realization {realization} depth {}",
                a.depth
            );
        }
    }
}

#[test]
fn amplitude_damping_leaks_out_of_odd_parity() {
    // Decoupling maps leaked |00> onto |11>, which decays back into the odd
    // block at second order in n·λ1, so the comparison is relative.
    let lambda1 = 1e-4;
    let noise = NoiseConfig {
        lambda1,
        ..NoiseConfig::exact()
    };
    let gate = GateParams::new(0.3, 0.1, 0.2, 0.5, 0.0);
    let depths = [2, 10, 30];
    for rec in run_swap_family(
        &gate,
        &noise,
        &depths,
        SwapAxis::X,
        &FamilyOptions::default(),
    )
    .unwrap()
    {
        let p = rec.populations[&Prep::Zero1];
        let leaked = 1.0 - (-(rec.depth as f64) * lambda1).exp();
        assert!(
            (p[0] + p[3] - leaked).abs() < 0.02 * leaked,
            "depth {}",
            rec.depth
        );
        assert!((rec.parity_postselected_fraction - (p[1] + p[2])).abs() < 1e-12);
    }
}

#[test]
fn postselection_renormalizes_odd_block() {
    let noise = NoiseConfig {
        lambda1: 0.02,
        ..NoiseConfig::exact()
    };
    let gate = GateParams::new(0.3, 0.1, 0.2, 0.5, 0.0);
    let opts = FamilyOptions {
        postselect: true,
        ..FamilyOptions::default()
    };
    let clean = run_swap_family(&gate, &NoiseConfig::exact(), &[20], SwapAxis::X, &opts).unwrap();
    let kept = run_swap_family(&gate, &noise, &[20], SwapAxis::X, &opts).unwrap();
    let a = clean[0].bloch(Prep::Zero1).unwrap();
    let b = kept[0].bloch(Prep::Zero1).unwrap();
    let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    assert!(norm <= 1.0 + 1e-12);
    // Pure damping keeps the odd-block direction intact.
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    assert!((dot / norm - 1.0).abs() < 1e-9);
}

#[test]
fn single_qubit_pi_pulse_has_period_two() {
    let gate = SingleQubitParams::x_pi();
    let identity = SingleQubitParams::new(0.0, 0.0, 0.0);
    let depths = [1, 2, 3, 4];
    let recs =
        run_single_qubit_family(&gate, None, &NoiseConfig::exact(), &depths, &[0.0], 0).unwrap();
    for rec in &recs {
        let signal = rec.signal();
        let expected = cis(rec.depth as f64 * PI);
        assert!((signal - expected).norm() < 1e-12, "depth {}", rec.depth);
    }
    let recs = run_single_qubit_family(&identity, None, &NoiseConfig::exact(), &depths, &[0.0], 0)
        .unwrap();
    for rec in &recs {
        assert!((rec.p0 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_qubit_signal_winds_at_twice_the_rabi_angle() {
    let gate = SingleQubitParams::new(1.3, 0.4, -0.7);
    let z_offsets = [0.0, 0.8, -1.9];
    let depths = [1, 2, 5, 13];
    let recs = run_single_qubit_family(&gate, None, &NoiseConfig::exact(), &depths, &z_offsets, 0)
        .unwrap();
    for rec in &recs {
        let cycle = meadd::linalg::z_rot(rec.z) * build_single_qubit(&gate);
        // Rabi angle from the trace of the cycle.
        let trace = cycle.trace() / cycle.determinant().sqrt();
        let omega = (trace.re / 2.0).clamp(-1.0, 1.0).acos();
        assert!((rec.reference_rabi.abs() - omega).abs() < 1e-9);
        let expected = cis(2.0 * rec.depth as f64 * rec.reference_rabi);
        assert!(
            (rec.signal() - expected).norm() < 1e-9,
            "z {} depth {}",
            rec.z,
            rec.depth
        );
    }
}

#[test]
fn perfect_pi_pulse_echoes_idle_phase() {
    let x_pi = SingleQubitParams::new(PI, 0.0, 0.1);
    let x_half = SingleQubitParams::new(-FRAC_PI_2, 0.0, 0.25);
    let depths = [1, 3, 8, 21];
    let z = [0.0, 0.6];
    let clean =
        run_relative_axis_family(&x_pi, &x_half, &NoiseConfig::exact(), &depths, &z, 0).unwrap();
    let drift = NoiseConfig {
        sq_phase_drift_std: 0.1,
        ..NoiseConfig::exact()
    };
    for realization in 0..4 {
        let drifted =
            run_relative_axis_family(&x_pi, &x_half, &drift, &depths, &z, realization).unwrap();
        for (a, b) in clean.iter().zip(&drifted) {
            assert!((a.signal() - b.signal()).norm() < 1e-12);
        }
    }
}

#[test]
fn tomography_record_holds_depth_one_matrices() {
    let gate = random_gate(7);
    let u = build_two_qubit(&gate);
    let rec = run_baseline_unitary_tomography(&gate, &NoiseConfig::exact(), 0).unwrap();
    assert_eq!(rec.depth, 1);
    assert!((rec.matrix().unwrap() - coherence_oracle(&u)).norm() < 1e-12);
    let w33 = u[(3, 3)];
    let mut expected = Mat2::zeros();
    for (r, &i) in [1usize, 2].iter().enumerate() {
        for (col, &j) in [1usize, 2].iter().enumerate() {
            expected[(r, col)] = w33 * u[(i, j)].conj();
        }
    }
    assert!((rec.matrix_ref11().unwrap() - expected).norm() < 1e-12);
}

#[test]
fn sampling_is_reproducible_per_cell() {
    let gate = GateParams::new(0.1, 0.2, 0.3, 0.4, 0.0);
    let noise = NoiseConfig {
        zeta_drift_std: 0.01,
        ..NoiseConfig::with_shots(500, 42)
    };
    let depths = [2, 4, 6];
    let opts = FamilyOptions::default();
    let a = run_cphase_family(&gate, &noise, &depths, &opts).unwrap();
    let b = run_cphase_family(&gate, &noise, &depths, &opts).unwrap();
    assert_eq!(a, b);
    // A subset of depths reuses the same per-cell streams.
    let sub = run_cphase_family(&gate, &noise, &[4], &opts).unwrap();
    assert_eq!(sub[0], a[1]);
    let other = FamilyOptions {
        realization: 1,
        ..FamilyOptions::default()
    };
    assert_ne!(
        run_cphase_family(&gate, &noise, &depths, &other).unwrap(),
        a
    );
}

#[test]
fn dd_sequence_names_round_trip() {
    for (name, dd) in [
        ("xx", DdSequence::Xx),
        ("xy4", DdSequence::Xy4),
        ("none", DdSequence::None),
    ] {
        assert_eq!(DdSequence::parse(name), Some(dd));
    }
    assert_eq!(DdSequence::parse("zz"), None);
}

fn coherence_norm(z: C64) -> f64 {
    z.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_expectations_are_bounded(
        theta in 0.0..FRAC_PI_2, zeta in -PI..PI, chi in -PI..PI, phi in -PI..PI,
        seed in 0u64..1000, lambda in 0.0..0.05f64,
    ) {
        let gate = GateParams::new(theta, zeta, chi, phi, 0.0);
        let noise = NoiseConfig { lambda1: lambda, lambda2: lambda, ..NoiseConfig::with_shots(200, seed) };
        let recs = run_cphase_family(&gate, &noise, &[2, 6], &FamilyOptions::default()).unwrap();
        for rec in &recs {
            for prep in [Prep::ZeroPlus, Prep::Plus0] {
                for q in [Qubit::Left, Qubit::Right] {
                    prop_assert!(coherence_norm(rec.coherence(prep, q).unwrap()) <= 2f64.sqrt() + 1e-12);
                }
            }
        }
        let swap = run_swap_family(&gate, &noise, &[2, 4], SwapAxis::Y, &FamilyOptions::default()).unwrap();
        for rec in &swap {
            for v in rec.bloch(Prep::Zero1).unwrap() {
                prop_assert!(v.abs() <= 1.0 + 1e-12);
            }
            let p = rec.populations[&Prep::Zero1];
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_swap_stays_in_odd_parity(
        theta in 0.0..FRAC_PI_2, zeta in -PI..PI, chi in -PI..PI, phi in -PI..PI, k in 1usize..20,
    ) {
        let gate = GateParams::new(theta, zeta, chi, phi, 0.3);
        let recs = run_swap_family(&gate, &NoiseConfig::exact(), &[2 * k], SwapAxis::X, &FamilyOptions::default()).unwrap();
        let p = recs[0].populations[&Prep::Zero1];
        prop_assert!((p[1] + p[2] - 1.0).abs() < 1e-12);
        let b = recs[0].bloch(Prep::Zero1).unwrap();
        prop_assert!((b[0] * b[0] + b[1] * b[1] + b[2] * b[2] - 1.0).abs() < 1e-9);
    }
}
