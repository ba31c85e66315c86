mod support;

use contagion_core::crisis_dist::{
    brute_force_joint, crisis_layer_step, crisis_layer_step_beta, crisis_layers, joint_cycle_severity,
    joint_cycle_severity_beta, CrisisJointDist, CrisisLayer,
};
use contagion_core::model::{BetaRegimeParams, RegimeParams, Sector, SectorState};
use rand::Rng;

fn initial_grid(max_total: u32) -> Vec<SectorState> {
    let mut out = Vec::new();
    for n1 in 1..=max_total {
        for n2 in 1..=max_total {
            for y1 in 1..=n1 {
                for y2 in 1..=n2 {
                    out.push(SectorState::new(n1 - y1, y1, n2 - y2, y2));
                }
            }
        }
    }
    out
}

fn assert_support_and_mass(joint: &CrisisJointDist, tol: f64) {
    let x0 = joint.initial.survivors(joint.sector);
    assert!((joint.total_mass() - 1.0).abs() <= tol, "mass {}", joint.total_mass());
    for (n, w, p) in joint.iter() {
        assert!(
            n >= 1 && n <= x0 + 1 && w <= x0,
            "({n}, {w}) outside support for x0 = {x0}"
        );
        assert!((0.0..=1.0 + 1e-15).contains(&p));
        // Each of the n - 1 crisis periods adds at least one default.
        assert!(w + 1 >= n);
    }
}

#[test]
fn recursion_matches_enumeration_on_small_states() {
    let mut rng = support::rng(2024);
    let states = initial_grid(4);
    for _ in 0..20 {
        let params = support::random_regime_params(&mut rng);
        for state in &states {
            for sector in [Sector::A, Sector::B] {
                let exact = joint_cycle_severity(&params, state, sector).unwrap();
                let oracle = brute_force_joint(&params, state, sector).unwrap();
                assert!(exact.max_abs_diff(&oracle) <= 1e-12, "{state:?} {sector}");
                assert_support_and_mass(&exact, 1e-10);
            }
        }
    }
}

#[test]
fn beta_recursion_matches_enumeration_on_small_states() {
    let mut rng = support::rng(77);
    let states = initial_grid(3);
    for _ in 0..10 {
        let mut shape = || (0.1 + 20.0 * rng.random::<f64>(), 0.1 + 20.0 * rng.random::<f64>());
        let a = [shape(), shape(), shape(), shape()];
        let b = [shape(), shape(), shape(), shape()];
        let params = BetaRegimeParams::new(a, b).unwrap();
        for state in &states {
            for sector in [Sector::A, Sector::B] {
                let exact = joint_cycle_severity_beta(&params, state, sector).unwrap();
                let oracle = brute_force_joint(&params, state, sector).unwrap();
                assert!(exact.max_abs_diff(&oracle) <= 1e-10);
                assert_support_and_mass(&exact, 1e-10);
            }
        }
    }
}

#[test]
fn three_by_three_matches_enumeration_exactly() {
    let mut rng = support::rng(5);
    let params = support::random_regime_params(&mut rng);
    let state = SectorState::new(3, 2, 3, 1);
    let exact = joint_cycle_severity(&params, &state, Sector::A).unwrap();
    let oracle = brute_force_joint(&params, &state, Sector::A).unwrap();
    assert!(exact.max_abs_diff(&oracle) <= 1e-12);
}

#[test]
fn sector_swap_symmetry() {
    let mut rng = support::rng(31);
    for _ in 0..10 {
        let params = support::random_regime_params(&mut rng);
        let state = SectorState::new(
            rng.random_range(0..8),
            rng.random_range(1..3),
            rng.random_range(0..8),
            rng.random_range(1..3),
        );
        let b = joint_cycle_severity(&params, &state, Sector::B).unwrap();
        let a = joint_cycle_severity(&params.swapped(), &state.swapped(), Sector::A).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-14);

        let beta = BetaRegimeParams::concentrated(
            &RegimeParams::new(
                params.a.map(|p| p.clamp(0.05, 0.95)),
                params.b.map(|p| p.clamp(0.05, 0.95)),
            )
            .unwrap(),
            3.0,
        )
        .unwrap();
        let b = joint_cycle_severity_beta(&beta, &state, Sector::B).unwrap();
        let a = joint_cycle_severity_beta(&beta.swapped(), &state.swapped(), Sector::A).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-14);
    }
}

#[test]
fn concentrated_beta_reproduces_basic_model() {
    let params = RegimeParams::new([0.1, 0.35, 0.2, 0.55], [0.15, 0.3, 0.25, 0.6]).unwrap();
    let beta = BetaRegimeParams::concentrated(&params, 1e6).unwrap();
    let state = SectorState::new(8, 2, 6, 1);
    for sector in [Sector::A, Sector::B] {
        let basic = joint_cycle_severity(&params, &state, sector).unwrap();
        let mixed = joint_cycle_severity_beta(&beta, &state, sector).unwrap();
        assert!(basic.max_abs_diff(&mixed) <= 1e-3);
    }

    let mut basic_layer = CrisisLayer::initial(&state, Sector::A).unwrap();
    let mut beta_layer = basic_layer.clone();
    for _ in 0..4 {
        basic_layer = crisis_layer_step(&basic_layer, &params);
        beta_layer = crisis_layer_step_beta(&beta_layer, &beta);
        for (key, p) in &basic_layer.entries {
            assert!((beta_layer.get(key.x1, key.x2, key.h) - p).abs() <= 1e-3);
        }
    }
}

#[test]
fn layer_mass_equals_survival_probability() {
    let params = RegimeParams::new([0.1, 0.4, 0.2, 0.5], [0.05, 0.3, 0.3, 0.45]).unwrap();
    let state = SectorState::new(12, 1, 9, 2);
    let layers = crisis_layers(&params, &state, Sector::A).unwrap();
    let joint = joint_cycle_severity(&params, &state, Sector::A).unwrap();
    let cycle = joint.cycle_marginal();
    for layer in &layers {
        // P(T >= n + 1) = 1 - P(T <= n)
        let ended: f64 = cycle.range(..=layer.n).map(|(_, p)| p).sum();
        assert!((layer.total_mass() - (1.0 - ended)).abs() < 1e-12);
        assert!(layer.n <= state.x1);
    }
}

#[test]
fn moderate_portfolio_is_normalized() {
    let params = RegimeParams::new([0.002, 0.02, 0.01, 0.05], [0.003, 0.03, 0.015, 0.06]).unwrap();
    let state = SectorState::new(60, 3, 40, 2);
    for sector in [Sector::A, Sector::B] {
        let joint = joint_cycle_severity(&params, &state, sector).unwrap();
        assert_support_and_mass(&joint, 1e-10);
    }
}
