use contagion_core::crisis_dist::{joint_cycle_severity, joint_cycle_severity_beta};
use contagion_core::model::{BetaRegimeParams, RegimeParams, Sector, SectorState};
use contagion_core::simulate::{monte_carlo_joint, simulate_path, SimConfig, SimModel};

fn params() -> RegimeParams {
    RegimeParams::new([0.05, 0.2, 0.1, 0.3], [0.04, 0.15, 0.12, 0.25]).unwrap()
}

fn mc(model: SimModel, initial: SectorState, seed: u64, paths: usize) -> contagion_core::crisis_dist::CrisisJointDist {
    let cfg = SimConfig {
        n_paths: paths,
        ..SimConfig::new(seed, model, initial)
    };
    monte_carlo_joint(&cfg, Sector::A).unwrap()
}

#[test]
fn simulation_matches_exact_table() {
    let initial = SectorState::new(5, 1, 5, 1);
    let exact = joint_cycle_severity(&params(), &initial, Sector::A).unwrap();
    let sim = mc(SimModel::Basic(params()), initial, 2024, 100_000);
    assert!(
        sim.total_variation(&exact) <= 0.01,
        "tv {}",
        sim.total_variation(&exact)
    );
}

#[test]
fn simulation_matches_exact_beta_table() {
    let beta = BetaRegimeParams::new(
        [(1.0, 10.0), (2.0, 8.0), (1.5, 9.0), (3.0, 6.0)],
        [(1.0, 12.0), (2.0, 9.0), (1.0, 7.0), (2.5, 5.0)],
    )
    .unwrap();
    let initial = SectorState::new(5, 1, 5, 1);
    let exact = joint_cycle_severity_beta(&beta, &initial, Sector::A).unwrap();
    let sim = mc(SimModel::Beta(beta), initial, 7, 100_000);
    assert!(
        sim.total_variation(&exact) <= 0.01,
        "tv {}",
        sim.total_variation(&exact)
    );
}

#[test]
fn error_shrinks_with_more_paths() {
    let initial = SectorState::new(5, 1, 5, 1);
    let exact = joint_cycle_severity(&params(), &initial, Sector::A).unwrap();
    // Average over seeds so a lucky small run cannot invert the ordering.
    let mean_tv = |paths: usize| -> f64 {
        (0..5)
            .map(|s| mc(SimModel::Basic(params()), initial, 100 + s, paths).total_variation(&exact))
            .sum::<f64>()
            / 5.0
    };
    let (small, large) = (mean_tv(1_000), mean_tv(100_000));
    assert!(large < small / 3.0, "{small} -> {large}");
}

#[test]
fn same_seed_same_output() {
    let cfg = SimConfig {
        max_steps: 50,
        ..SimConfig::new(99, SimModel::Basic(params()), SectorState::new(20, 1, 20, 1))
    };
    assert_eq!(simulate_path(&cfg).unwrap(), simulate_path(&cfg).unwrap());
    let a = mc(SimModel::Basic(params()), SectorState::new(5, 1, 5, 1), 3, 2000);
    let b = mc(SimModel::Basic(params()), SectorState::new(5, 1, 5, 1), 3, 2000);
    assert_eq!(a, b);
    let c = mc(SimModel::Basic(params()), SectorState::new(5, 1, 5, 1), 4, 2000);
    assert_ne!(a, c);
}

#[test]
fn no_contagion_ends_after_one_period() {
    let quiet = RegimeParams::new([0.05, 0.2, 0.1, 0.0], [0.04, 0.15, 0.12, 0.0]).unwrap();
    let sim = mc(SimModel::Basic(quiet), SectorState::new(5, 1, 5, 1), 1, 1000);
    assert_eq!(sim.get(1, 0), 1.0);
}

#[test]
fn paths_follow_the_survivor_identity() {
    let cfg = SimConfig {
        max_steps: 200,
        ..SimConfig::new(5, SimModel::Basic(params()), SectorState::new(30, 2, 25, 0))
    };
    let path = simulate_path(&cfg).unwrap();
    assert_eq!(path[0], cfg.initial);
    assert_eq!(path.len(), 201);
    assert!(path.windows(2).all(|w| w[0].is_successor(&w[1])));
}
