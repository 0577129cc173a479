use std::f64::consts::{PI, TAU};

use fluxring::{
    evolve, fidelity, make_gaussian_packet, position_density, rotate, Complex64, PacketSpec,
    StateVector,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn arb_state() -> impl Strategy<Value = StateVector> {
    (
        -6i64..6,
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40),
    )
        .prop_filter_map("zero vector", |(n_min, raw)| {
            let amps = raw
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            StateVector::from_amplitudes(n_min, amps).ok()
        })
}

fn arb_packet() -> impl Strategy<Value = StateVector> {
    (1.0f64..20.0, -5i64..=5, 0.0..TAU)
        .prop_map(|(dn, n0, phi0)| make_gaussian_packet(&PacketSpec::new(dn, n0, phi0)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_is_unitary(psi in arb_state(), tau in -3.0f64..3.0, alpha in -2.0f64..2.0) {
        prop_assert!((evolve(&psi, tau, alpha).norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_revival(psi in arb_state()) {
        prop_assert!((fidelity(&evolve(&psi, 1.0, 0.0), &psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn revival_rotates_by_twice_the_ab_phase(psi in arb_state(), alpha in -1.0f64..1.0) {
        let shifted = rotate(&psi, 4.0 * PI * alpha);
        prop_assert!((fidelity(&evolve(&psi, 1.0, alpha), &shifted) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flux_is_seen_modulo_half(psi in arb_packet(), alpha in 0.0f64..1.0) {
        let m = psi.default_grid_size();
        let a = position_density(&evolve(&psi, 1.0, alpha), m).unwrap();
        let b = position_density(&evolve(&psi, 1.0, alpha + 0.5), m).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn half_revival_is_a_half_turn(psi in arb_state()) {
        prop_assert!((fidelity(&evolve(&psi, 0.5, 0.0), &rotate(&psi, PI)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_level_drops_out_at_revival(
        dn in 2.0f64..12.0,
        n0 in -30i64..30,
        phi0 in 0.0..TAU,
        alpha in 0.0f64..0.5,
    ) {
        let moving = make_gaussian_packet(&PacketSpec::new(dn, n0, phi0)).unwrap();
        let still = make_gaussian_packet(&PacketSpec::new(dn, 0, phi0)).unwrap();
        let m = 1024;
        let a = position_density(&evolve(&moving, 1.0, alpha), m).unwrap();
        let b = position_density(&rotate(&still, 4.0 * PI * alpha), m).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn evolution_composes(psi in arb_state(), t1 in -1.0f64..1.0, t2 in -1.0f64..1.0, alpha in -1.0f64..1.0) {
        let two_steps = evolve(&evolve(&psi, t1, alpha), t2, alpha);
        let one_step = evolve(&psi, t1 + t2, alpha);
        prop_assert!((fidelity(&two_steps, &one_step) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_is_a_probability(psi in arb_state(), tau in 0.0f64..1.0) {
        let d = position_density(&evolve(&psi, tau, 0.3), 4 * psi.len().max(16)).unwrap();
        prop_assert!((d.integral() - 1.0).abs() < 1e-9);
        prop_assert!(d.values().iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn hundred_random_packets_revive_exactly() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..100 {
        let psi = arb_packet().new_tree(&mut runner).unwrap().current();
        assert!(fidelity(&evolve(&psi, 1.0, 0.0), &psi) >= 1.0 - 1e-12);
    }
}
