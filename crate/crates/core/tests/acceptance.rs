//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion is red. Runs without the libtest harness so the verdict lines
//! are never captured.

use meadd::circuits::{
    run_cphase_family, run_relative_axis_family, run_swap_family, DdSequence, FamilyOptions,
    SwapAxis,
};
use meadd::estimation::{
    characterize, estimate_single_qubit, estimate_theta_chi, names, MeaddPlan, SwapOptions,
};
use meadd::gate_algebra::{build_two_qubit, fundamental_entangler, GateParams, SingleQubitParams};
use meadd::harness::{
    preset, run, CrosstalkSpec, DragSpec, Experiment, ExperimentConfig, RunOutput,
};
use meadd::linalg::{kron, wrap_angle, Mat4, Pauli, C64};
use meadd::noise::NoiseConfig;
use meadd::robustness::{
    adjoint_blocks, error_directions, robustness_verdict, twirl_sum,
    verify_first_order_cancellation, Block6, VerdictOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn metric(out: &RunOutput, name: &str) -> f64 {
    out.metrics.get(name).copied().unwrap_or(f64::NAN)
}

fn angle_err(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

// 1. Controlled phase under decoupling-pulse over-rotation.
fn overrotation_robustness() -> Verdict {
    let robust = run(&preset("fig6").expect("fig6 preset")).expect("fig6 run");
    let fractions = [0.0, 0.02, 0.05, 0.1];
    let rms: Vec<f64> = fractions
        .iter()
        .map(|f| metric(&robust, &format!("residual_rms@{f}")))
        .collect();
    let worst_rms = rms.iter().cloned().fold(0.0, f64::max);
    let phi_err = metric(&robust, "phi_error@0.1");

    let mut xy4 = preset("fig6").expect("fig6 preset");
    if let Experiment::Cphase(spec) = &mut xy4.experiment {
        spec.dd = DdSequence::Xy4;
        spec.over_rotations = vec![0.02];
    }
    xy4.expect.clear();
    let fragile = run(&xy4).expect("xy4 run");
    let xy4_err = metric(&fragile, "phi_error@0.02");

    verdict(
        worst_rms < 1e-3 && phi_err < 1e-3 && xy4_err > 1e-2,
        format!(
            "residual rms by over-rotation [{}] (need < 1e-3), |phi error| at 10% {phi_err:.2e} (need < 1e-3), \
             XY4 at 2% {xy4_err:.2e} (need > 1e-2)",
            rms.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

// 2. SNR trends against the baselines.
fn snr_trends() -> Verdict {
    let out = run(&preset("fig5").expect("fig5 preset")).expect("fig5 run");
    let flat = [
        metric(&out, "meadd_flatness@0.01"),
        metric(&out, "meadd_flatness@0.03"),
    ];
    let drop = [
        metric(&out, "phase_method_drop@0.01"),
        metric(&out, "phase_method_drop@0.03"),
    ];
    let advantage = metric(&out, "meadd_over_phase_method_min");
    verdict(
        flat.iter().all(|f| *f < 1.5) && drop.iter().all(|d| *d < 0.5) && advantage >= 1.0,
        format!(
            "MEADD max/min over zeta {flat:.3?} (need < 1.5), phase-method SNR(10 theta)/SNR(0) {drop:.3?} \
             (need < 0.5), min MEADD/phase-method at zeta >= theta {advantage:.3} (need >= 1)"
        ),
    )
}

// 3. Decoherence-limited variance.
fn variance_oracle() -> Verdict {
    let out = run(&preset("appendixF").expect("appendixF preset")).expect("appendixF run");
    let (lo, hi) = (
        metric(&out, "single_ratio_min"),
        metric(&out, "single_ratio_max"),
    );
    let nstar = metric(&out, "two_qubit_nstar_ratio");
    verdict(
        hi < 1.0 && lo > 1.0 / 3.0 && (nstar - 1.0).abs() <= 0.2,
        format!(
            "single-qubit std/bound over 20 repeats in [{lo:.3}, {hi:.3}] (need within (1/3, 1)), \
             two-qubit fitted n*/formula {nstar:.3} (need 1 +/- 0.2)"
        ),
    )
}

fn block(rows: [[f64; 6]; 6], scale: f64) -> Block6 {
    Block6::from_fn(|i, j| rows[i][j] * scale)
}

fn rotation_pairs(a: f64, b: f64, c: f64) -> Block6 {
    let mut m = Block6::zeros();
    for (k, angle) in [a, b, c].into_iter().enumerate() {
        let (s, co) = angle.sin_cos();
        m[(2 * k, 2 * k)] = co;
        m[(2 * k, 2 * k + 1)] = -s;
        m[(2 * k + 1, 2 * k)] = s;
        m[(2 * k + 1, 2 * k + 1)] = co;
    }
    m
}

// 4. Adjoint blocks, twirl sums and verdicts.
fn robustness_exactness() -> Verdict {
    let xx = kron(&Pauli::X.matrix(), &Pauli::X.matrix());
    let r = 2f64.sqrt();
    let mut worst: f64 = 0.0;
    let mut check = |u: &Mat4, plus: Block6, minus: Block6| {
        let s = adjoint_blocks(u);
        worst = worst
            .max((s.symmetric - plus).abs().max())
            .max((s.antisymmetric - minus).abs().max());
    };
    for (theta, phi) in [(0.3, 0.7), (-1.1, 2.5), (FRAC_PI_4, PI)] {
        check(
            &fundamental_entangler(theta, phi),
            rotation_pairs(theta - phi / 2.0, phi / 2.0 - theta, 0.0),
            rotation_pairs(theta + phi / 2.0, theta + phi / 2.0, 2.0 * theta),
        );
    }
    let dd = Block6::from_diagonal(&nalgebra::Vector6::new(1.0, 1.0, -1.0, -1.0, -1.0, -1.0));
    check(&xx, dd, dd);
    check(
        &(xx * build_two_qubit(&GateParams::cz())),
        block(
            [
                [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                [0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            ],
            1.0,
        ),
        block(
            [
                [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
            ],
            1.0,
        ),
    );
    check(
        &(xx * fundamental_entangler(FRAC_PI_4, 0.0)),
        block(
            [
                [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
                [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, -r, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, -r],
            ],
            1.0 / r,
        ),
        block(
            [
                [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
                [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, r],
                [0.0, 0.0, 0.0, 0.0, -r, 0.0],
            ],
            1.0 / r,
        ),
    );
    check(
        &fundamental_entangler(FRAC_PI_2, 0.0),
        block(
            [
                [0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            ],
            1.0,
        ),
        block(
            [
                [0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
            ],
            1.0,
        ),
    );

    let dirs = error_directions(false);
    let twirl_max = |u: &Mat4, n: usize| {
        twirl_sum(&adjoint_blocks(u), &dirs, n)
            .into_iter()
            .fold(0.0, f64::max)
    };
    let cz_cycle = xx * build_two_qubit(&GateParams::cz());
    let sq_cycle = xx * fundamental_entangler(FRAC_PI_4, 0.0);
    let cz4 = twirl_max(&cz_cycle, 4);
    let sq8 = twirl_max(&sq_cycle, 8);
    let sq4 = twirl_max(&sq_cycle, 4);

    let iswap = robustness_verdict(
        &GateParams::iswap(),
        DdSequence::Xx,
        VerdictOptions::default(),
    );
    let idle = robustness_verdict(
        &GateParams::iswap(),
        DdSequence::Xx,
        VerdictOptions {
            alternating_idle: true,
            ..VerdictOptions::default()
        },
    );
    let flagged = !iswap.flipped_degeneracies.is_empty() && !iswap.robust;
    verdict(
        worst < 1e-12 && cz4 < 1e-12 && sq8 < 1e-12 && sq4 > 1e-3 && flagged && idle.robust,
        format!(
            "max block deviation {worst:.1e}, twirl residual CZ n=4 {cz4:.1e}, sqrt-iSWAP n=8 {sq8:.1e} \
             (n=4 {sq4:.2}), iSWAP degeneracy flagged {flagged}, alternating idle robust {}",
            idle.robust
        ),
    )
}

// 5. First-order cancellation scaling.
fn cancellation_scaling() -> Verdict {
    let grid = [1e-4, 1e-3, 1e-2, 1e-1];
    let dir = [1.0, 1.0, 1.0];
    let robust =
        verify_first_order_cancellation(&GateParams::cz(), DdSequence::Xx, &grid, dir, 4).slope;
    let fragile =
        verify_first_order_cancellation(&GateParams::cz(), DdSequence::Xy4, &grid, dir, 4).slope;
    verdict(
        (robust - 2.0).abs() <= 0.15 && (fragile - 1.0).abs() <= 0.15,
        format!("log-log slope robust X⊗X {robust:.3} (need 2 +/- 0.15), XY4 {fragile:.3} (need 1 +/- 0.15)"),
    )
}

/// Parameters read straight off a dense excitation-preserving matrix built
/// here, independently of the library's gate constructor.
fn dense_oracle(p: &GateParams) -> [f64; 5] {
    let cis = |a: f64| C64::from_polar(1.0, a);
    let (s, c) = p.theta.sin_cos();
    let mut w00 = cis(p.gamma);
    let mut w11 = cis(-p.zeta) * c;
    let mut w12 = C64::new(0.0, -1.0) * cis(p.chi) * s;
    let mut w33 = cis(-(p.gamma + p.phi));
    // Data fix the matrix only up to an overall sign; pick the one with
    // Re w00 > 0.
    if w00.re < 0.0 {
        for w in [&mut w00, &mut w11, &mut w12, &mut w33] {
            *w = -*w;
        }
    }
    let gamma = w00.arg();
    [
        w12.norm().atan2(w11.norm()),
        -w11.arg(),
        w12.arg() + FRAC_PI_2,
        -w33.arg() - gamma,
        gamma,
    ]
}

// 6. Exact recovery.
fn exact_recovery() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..100 {
        let gate = GateParams::new(
            rng.random_range(0.0..0.1),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
        );
        let oracle = dense_oracle(&gate);
        match characterize(
            &gate,
            &NoiseConfig::exact(),
            &MeaddPlan::default(),
            &FamilyOptions::default(),
        ) {
            Ok(r) => {
                let got = [
                    names::THETA,
                    names::ZETA,
                    names::CHI,
                    names::PHI,
                    names::GAMMA,
                ]
                .map(|n| r.get(n).unwrap_or(f64::NAN));
                let err = (got[0] - oracle[0]).abs().max(
                    (1..5)
                        .map(|i| angle_err(got[i], oracle[i]))
                        .fold(0.0, f64::max),
                );
                worst = worst.max(err);
            }
            Err(_) => failures += 1,
        }
    }
    let large = GateParams::new(0.3, 0.0, -2.1, PI, 0.0);
    let opts = FamilyOptions::default();
    let depths: Vec<usize> = (1..=7).map(|k| 2 * k).collect();
    let x = run_swap_family(&large, &NoiseConfig::exact(), &depths, SwapAxis::X, &opts)
        .expect("swap x");
    let y = run_swap_family(&large, &NoiseConfig::exact(), &depths, SwapAxis::Y, &opts)
        .expect("swap y");
    let large_err = estimate_theta_chi(&x, &y, &SwapOptions::default()).map_or(f64::NAN, |r| {
        (r.get(names::THETA).unwrap_or(f64::NAN) - 0.3).abs()
    });
    verdict(
        failures == 0 && worst < 1e-6 && large_err < 1e-9,
        format!(
            "100 random gates: worst parameter error {worst:.2e} (need < 1e-6), {failures} estimator errors; \
             theta = 0.3 error {large_err:.1e} (need < 1e-9)"
        ),
    )
}

// 7. Echo properties.
fn echo_properties() -> Verdict {
    // (a) Drift draws leave the decoupled determinant untouched.
    let gate = GateParams::new(0.05, 0.4, -0.3, 1.1, 0.2);
    let depths: Vec<usize> = (1..=7).map(|k| 2 * k).collect();
    let clean = run_cphase_family(
        &gate,
        &NoiseConfig::exact(),
        &depths,
        &FamilyOptions::default(),
    )
    .expect("clean");
    let drift = NoiseConfig {
        zeta_drift_std: 0.05,
        gamma_drift_std: 0.05,
        ..NoiseConfig::exact()
    };
    let mut det_dev: f64 = 0.0;
    for r in 0..10 {
        let noisy = run_cphase_family(
            &gate,
            &drift,
            &depths,
            &FamilyOptions::default().realization(r),
        )
        .expect("drift");
        for (a, b) in clean.iter().zip(&noisy) {
            let (da, db) = (
                a.matrix().expect("m").determinant(),
                b.matrix().expect("m").determinant(),
            );
            det_dev = det_dev.max(angle_err(da.arg(), db.arg()));
        }
    }

    // (b) Relative axis with and without single-qubit phase drift, 10^4 shots.
    let x_pi = SingleQubitParams::new(PI, 0.0, 0.01);
    let x_half = SingleQubitParams::new(-FRAC_PI_2, 0.0, 0.03);
    let sq_depths: Vec<usize> = (1..=12).collect();
    let z_offsets = [0.0, FRAC_PI_2, PI, -FRAC_PI_2];
    let estimate = |noise: &NoiseConfig, r: u64| {
        let rec = run_relative_axis_family(&x_pi, &x_half, noise, &sq_depths, &z_offsets, r)
            .expect("relative axis");
        let e = estimate_single_qubit(&rec).expect("relative estimate");
        (
            e.get(names::ZETA).unwrap_or(f64::NAN),
            e.std_error(names::ZETA).unwrap_or(f64::NAN),
        )
    };
    let steady = NoiseConfig::with_shots(10_000, 3);
    // Independent shot streams, so the comparison is statistical.
    let drifting = NoiseConfig {
        sq_phase_drift_std: 0.1,
        ..NoiseConfig::with_shots(10_000, 4)
    };
    let mut worst_z: f64 = 0.0;
    for r in 0..5 {
        let (a, sa) = estimate(&steady, r);
        let (b, sb) = estimate(&drifting, r);
        worst_z = worst_z.max((a - b).abs() / sa.hypot(sb));
    }

    // (c) Frame tracking collapses the swap amplification.
    let swap_gate = GateParams::new(0.05, 0.5, 0.3, PI, 0.0);
    let tracked = FamilyOptions {
        phase_tracking: true,
        ..FamilyOptions::default()
    };
    let rate = |opts: &FamilyOptions| {
        let x = run_swap_family(
            &swap_gate,
            &NoiseConfig::exact(),
            &depths,
            SwapAxis::X,
            opts,
        )
        .expect("x");
        let y = run_swap_family(
            &swap_gate,
            &NoiseConfig::exact(),
            &depths,
            SwapAxis::Y,
            opts,
        )
        .expect("y");
        estimate_theta_chi(&x, &y, &SwapOptions::default())
            .map_or(0.0, |r| r.get(names::THETA).unwrap_or(0.0))
    };
    let (free, frozen) = (rate(&FamilyOptions::default()), rate(&tracked));
    let collapse = frozen.abs() / swap_gate.theta;

    verdict(
        det_dev < 1e-12 && worst_z < 3.0 && collapse < 0.1 && (free - swap_gate.theta).abs() < 1e-9,
        format!(
            "(a) max arg-det change under drift {det_dev:.1e} (need < 1e-12); (b) worst drift shift {worst_z:.2} sigma \
             (need < 3); (c) tracked/true swap angle {collapse:.3} (need < 0.1), untracked error {:.1e}",
            (free - swap_gate.theta).abs()
        ),
    )
}

// 8. DRAG.
fn drag_leakage() -> Verdict {
    let config = ExperimentConfig {
        name: "acceptance-drag".into(),
        seed: 0,
        experiment: Experiment::Drag(DragSpec {
            eta_min: 14.0,
            eta_max: 38.0,
            points: 9,
            amplitude: PI,
            steps: meadd::pulses::DEFAULT_STEPS,
        }),
        expect: Vec::new(),
    };
    let out = run(&config).expect("drag run");
    let exps = [
        metric(&out, "exponent_from_zero"),
        metric(&out, "exponent_from_one"),
    ];
    let ratio = metric(&out, "suppression_ratio_max");
    let halving = metric(&out, "halving_change_max");
    verdict(
        exps.iter().all(|e| (e + 3.0).abs() <= 0.3) && ratio < 0.2 && halving < 1e-8,
        format!(
            "plain leakage exponent {exps:.3?} (need -3 +/- 0.3), max DRAG/plain {ratio:.3} (need < 0.2), \
             step-halving change {halving:.1e} (need < 1e-8)"
        ),
    )
}

// 9. Crosstalk at desk scale.
fn crosstalk_precision() -> Verdict {
    let theta = 0.42e-3;
    let config = ExperimentConfig {
        name: "acceptance-crosstalk".into(),
        seed: 9,
        experiment: Experiment::Crosstalk(CrosstalkSpec {
            theta,
            chi: 0.7,
            zeta: 0.5,
            noise: NoiseConfig {
                shots: 2000,
                lambda1: 1e-3,
                zeta_drift_std: 0.05,
                ..NoiseConfig::default()
            },
            depths: (1..=10).map(|k| 40 * k).collect(),
            realizations: 10,
        }),
        expect: Vec::new(),
    };
    let out = run(&config).expect("crosstalk run");
    let (mean, std) = (metric(&out, "theta_mean"), metric(&out, "theta_std"));
    let bias_sigmas = (mean - theta).abs() / (std / 10f64.sqrt());
    verdict(
        std < 1e-4 && bias_sigmas < 3.0,
        format!(
            "10 runs at 2000 shots/circuit, depths 40..400: mean {:.4} mrad, std {:.4} mrad (need < 0.1), \
             mean offset {bias_sigmas:.2} standard errors (need < 3)",
            mean * 1e3,
            std * 1e3
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "controlled phase under over-rotation",
            overrotation_robustness,
        ),
        ("SNR trends against baselines", snr_trends),
        ("decoherence-limited variance", variance_oracle),
        ("robustness analyzer exactness", robustness_exactness),
        ("first-order cancellation scaling", cancellation_scaling),
        ("exact recovery", exact_recovery),
        ("echo properties", echo_properties),
        ("DRAG leakage", drag_leakage),
        ("crosstalk precision", crosstalk_precision),
    ];
    let mut red = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        red += usize::from(!v.passed);
        println!(
            "criterion {} ({name}): {} [{:.2}s] {}",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - red,
        criteria.len()
    );
    if red > 0 {
        std::process::exit(1);
    }
}
