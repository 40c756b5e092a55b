use meadd::pulses::{
    drag_envelope, evolve, geometric_grid, integrate_three_level, integrate_three_level_with_steps,
    leakage_scan, perturbative_leakage, power_law_exponent, shifted_cosine,
    shifted_cosine_derivative, shifted_cosine_second_derivative, PulseEnvelope, ThreeLevelState,
    DEFAULT_STEPS,
};
use meadd::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, SQRT_2};

#[test]
fn envelope_peak_and_edges() {
    for duration in [1.0, 15.0, 0.3] {
        assert!((shifted_cosine(0.0, duration) - 1.0 / duration).abs() < 1e-15);
        for edge in [-duration / 2.0, duration / 2.0] {
            assert!(shifted_cosine(edge, duration).abs() < 1e-15);
            assert!(shifted_cosine_derivative(edge, duration).abs() < 1e-12 / duration);
        }
        assert_eq!(shifted_cosine(0.51 * duration, duration), 0.0);
    }
}

#[test]
fn envelope_area_is_one_half() {
    // Midpoint rule; the integrand is smooth and periodic, so this is
    // accurate far beyond 1e-9.
    for duration in [1.0, 15.0] {
        let n = 10_000;
        let h = duration / n as f64;
        let area: f64 = (0..n)
            .map(|i| shifted_cosine(-duration / 2.0 + (i as f64 + 0.5) * h, duration) * h)
            .sum();
        assert!((area - 0.5).abs() < 1e-9, "area {area}");
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let h = 1e-5;
    for t in [-0.4, -0.1, 0.0, 0.23, 0.45] {
        let d1 = (shifted_cosine(t + h, 1.0) - shifted_cosine(t - h, 1.0)) / (2.0 * h);
        let d2 = (shifted_cosine_derivative(t + h, 1.0) - shifted_cosine_derivative(t - h, 1.0))
            / (2.0 * h);
        assert!((d1 - shifted_cosine_derivative(t, 1.0)).abs() < 1e-7);
        assert!((d2 - shifted_cosine_second_derivative(t, 1.0)).abs() < 1e-6);
    }
}

#[test]
fn drive_derivative_includes_detuning() {
    let pulse = PulseEnvelope::new(1.3).with_phase(0.4).with_detuning(2.5);
    let h = 1e-6;
    for t in [-0.3, 0.0, 0.2] {
        let numeric = (pulse.omega(t + h) - pulse.omega(t - h)) / (2.0 * h);
        assert!((numeric - pulse.omega_derivative(t)).norm() < 1e-7);
    }
}

#[test]
fn zero_drive_leaves_state_unchanged() {
    let pulse = PulseEnvelope::new(0.0);
    let out = integrate_three_level(&pulse, 20.0).unwrap();
    assert_eq!(out.from_one, ThreeLevelState::basis(1));
    assert_eq!(out.from_zero, ThreeLevelState::basis(0));
}

#[test]
fn pi_pulse_flips_the_qubit_and_leaks() {
    let theta = 0.7;
    let pulse = PulseEnvelope::new(PI).with_phase(theta);
    let out = integrate_three_level(&pulse, 60.0).unwrap();
    // Two-level oracle: exp(-i(π/2)(cos ϑ X + sin ϑ Y))|0⟩ = -i e^{iϑ}|1⟩.
    let target = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, theta);
    let overlap = (target.conj() * out.from_zero.amplitudes[1]).norm();
    assert!(overlap > 0.99, "overlap {overlap}");
    assert!(out.from_zero.leakage().norm() > 1e-5);
    assert!(out.from_one.leakage().norm() > 1e-5);
}

#[test]
fn step_halving_converges() {
    for eta in [14.0, 26.0, 38.0] {
        for pulse in [
            PulseEnvelope::new(PI),
            drag_envelope(&PulseEnvelope::new(PI), eta),
        ] {
            let coarse = integrate_three_level_with_steps(&pulse, eta, DEFAULT_STEPS).unwrap();
            let fine = integrate_three_level_with_steps(&pulse, eta, 2 * DEFAULT_STEPS).unwrap();
            assert!(coarse.from_one.distance(&fine.from_one) < 1e-8);
            assert!(coarse.from_zero.distance(&fine.from_zero) < 1e-8);
        }
    }
}

#[test]
fn coarse_steps_are_rejected() {
    let err = evolve(&PulseEnvelope::new(PI), 38.0, ThreeLevelState::basis(1), 12).unwrap_err();
    assert!(matches!(err, Error::StepTooLarge(d) if d > 1e-9));
}

#[test]
fn bad_inputs_are_config_errors() {
    let pulse = PulseEnvelope::new(PI);
    assert!(matches!(
        integrate_three_level(&pulse, 0.0),
        Err(Error::Config { .. })
    ));
    assert!(matches!(
        integrate_three_level(&pulse.with_duration(0.0), 20.0),
        Err(Error::Config { .. })
    ));
}

#[test]
fn drag_keeps_edges_and_vanishes_for_large_anharmonicity() {
    let pulse = PulseEnvelope::new(PI).with_phase(0.3);
    let drag = drag_envelope(&pulse, 20.0);
    assert!(drag.omega(-0.5).norm() < 1e-12 && drag.omega(0.5).norm() < 1e-12);
    let far = drag_envelope(&pulse, 1e12);
    for t in [-0.4, 0.0, 0.3] {
        assert!((far.omega(t) - pulse.omega(t)).norm() < 1e-10);
    }
    // Derivative mix is exactly i/η times the slope.
    let t = 0.17;
    let expected = pulse.omega(t) + Complex64::i() / 20.0 * pulse.omega_derivative(t);
    assert!((drag.omega(t) - expected).norm() < 1e-14);
}

#[test]
fn drag_suppresses_leakage_across_device_range() {
    let etas = geometric_grid(14.0, 38.0, 9);
    let scan = leakage_scan(&PulseEnvelope::new(PI), &etas, DEFAULT_STEPS).unwrap();
    for point in &scan {
        assert!(point.suppression_ratio() < 0.2, "{point:?}");
    }
}

#[test]
fn opposite_derivative_sign_increases_leakage() {
    let eta = 30.0;
    let plain = integrate_three_level(&PulseEnvelope::new(PI), eta).unwrap();
    let flipped = PulseEnvelope {
        drag_coefficient: -1.0 / eta,
        ..PulseEnvelope::new(PI)
    };
    let flipped = integrate_three_level(&flipped, eta).unwrap();
    assert!(flipped.from_zero.leakage().norm() > 1.5 * plain.from_zero.leakage().norm());
}

#[test]
fn plain_leakage_follows_inverse_cube() {
    let etas = geometric_grid(14.0, 38.0, 9);
    let scan = leakage_scan(&PulseEnvelope::new(PI), &etas, DEFAULT_STEPS).unwrap();
    let from_zero: Vec<f64> = scan.iter().map(|p| p.plain_from_zero).collect();
    let from_one: Vec<f64> = scan.iter().map(|p| p.plain_from_one).collect();
    for ys in [from_zero, from_one] {
        let exponent = power_law_exponent(&etas, &ys).unwrap();
        assert!((exponent + 3.0).abs() < 0.3, "exponent {exponent}");
    }
}

#[test]
fn leakage_approaches_edge_term() {
    // Only the edge where |1⟩ is populated contributes: |√2 Ω''(edge)| / η³
    // with Ω'' = 2π²μ at the edges.
    let steps = 8000;
    for eta in [80.0, 120.0] {
        let out = integrate_three_level_with_steps(&PulseEnvelope::new(PI), eta, steps).unwrap();
        let edge = SQRT_2 * 2.0 * PI.powi(3) / eta.powi(3);
        let ratio = out.from_zero.leakage().norm() / edge;
        assert!((ratio - 1.0).abs() < 0.1, "eta {eta} ratio {ratio}");
    }
}

#[test]
fn weak_pulse_matches_first_order_transform() {
    let pulse = PulseEnvelope::new(0.1);
    for eta in [14.0, 25.0, 38.0] {
        let out = integrate_three_level(&pulse, eta).unwrap();
        let first_order = perturbative_leakage(&pulse, eta, 20_000);
        let rel = (out.from_one.leakage().norm() - first_order.norm()).abs() / first_order.norm();
        assert!(rel < 0.1, "eta {eta} rel {rel}");
    }
}

#[test]
fn power_law_fit_recovers_exponent() {
    let xs = geometric_grid(2.0, 50.0, 7);
    let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x.powf(-2.7)).collect();
    assert!((power_law_exponent(&xs, &ys).unwrap() + 2.7).abs() < 1e-12);
    assert!(power_law_exponent(&[1.0], &[1.0]).is_err());
    assert!(power_law_exponent(&[1.0, 2.0], &[1.0, 0.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_is_conserved(mu in 0.0..PI, phase in -PI..PI, eta in 14.0..38.0f64, drag in any::<bool>()) {
        let plain = PulseEnvelope::new(mu).with_phase(phase);
        let pulse = if drag { drag_envelope(&plain, eta) } else { plain };
        let out = integrate_three_level(&pulse, eta).unwrap();
        prop_assert!((out.from_one.norm() - 1.0).abs() < 1e-9);
        prop_assert!((out.from_zero.norm() - 1.0).abs() < 1e-9);
    }
}
