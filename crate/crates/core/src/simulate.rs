//! Seeded Monte Carlo simulation of the two-sector chain.
//!
//! Randomness comes from ChaCha8 seeded with [`SimConfig::seed`]; path `i`
//! uses stream `i` of that generator, so paths are independent,
//! reproducible across platforms and can be generated in any order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma};

use crate::crisis_dist::CrisisJointDist;
use crate::error::{Error, Result};
use crate::estimate::SectorPanel;
use crate::model::{BetaRegimeParams, RegimeIndex, RegimeParams, Sector, SectorState};

/// Largest trial count sampled by inversion; larger counts use BTPE.
const INVERSION_MAX_TRIALS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimModel {
    Basic(RegimeParams),
    Beta(BetaRegimeParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    /// Run for `max_steps` periods.
    #[default]
    MaxSteps,
    /// Stop once neither sector has survivors.
    NoSurvivors,
    /// Stop at the first period with no defaults in either sector.
    NoDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub max_steps: usize,
    pub model: SimModel,
    pub initial: SectorState,
    pub stop: StopRule,
}

impl SimConfig {
    pub fn new(seed: u64, model: SimModel, initial: SectorState) -> Self {
        SimConfig {
            seed,
            n_paths: 1,
            max_steps: 100,
            model,
            initial,
            stop: StopRule::MaxSteps,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.max_steps == 0 {
            return Err(Error::InvalidParameter(
                "n_paths and max_steps must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Binomial draw: inversion by sequential search for small counts, BTPE
/// otherwise. Sampling the complement keeps `p <= 1/2`.
pub fn sample_binomial<R: Rng + ?Sized>(rng: &mut R, trials: u32, p: f64) -> u32 {
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    if p > 0.5 {
        return trials - sample_binomial(rng, trials, 1.0 - p);
    }
    if trials <= INVERSION_MAX_TRIALS {
        let odds = p / (1.0 - p);
        let mut pmf = (1.0 - p).powi(trials as i32);
        let mut cdf = pmf;
        let u: f64 = rng.random();
        let mut k = 0u32;
        while u > cdf && k < trials {
            pmf *= odds * f64::from(trials - k) / f64::from(k + 1);
            k += 1;
            cdf += pmf;
        }
        return k;
    }
    let dist = Binomial::new(u64::from(trials), p).expect("p checked to lie in (0, 1)");
    dist.sample(rng) as u32
}

/// Beta draw as `X / (X + Y)` with `X ~ Gamma(s1)`, `Y ~ Gamma(s2)`.
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, s1: f64, s2: f64) -> f64 {
    let x = Gamma::new(s1, 1.0).expect("positive shape").sample(rng);
    let y = Gamma::new(s2, 1.0).expect("positive shape").sample(rng);
    if x + y > 0.0 {
        x / (x + y)
    } else if rng.random::<f64>() < s1 / (s1 + s2) {
        // Both gamma draws underflowed; only possible for tiny shapes.
        1.0
    } else {
        0.0
    }
}

fn sample_defaults<R: Rng + ?Sized>(
    rng: &mut R,
    model: &SimModel,
    sector: Sector,
    regime: RegimeIndex,
    trials: u32,
) -> u32 {
    match model {
        SimModel::Basic(params) => sample_binomial(rng, trials, params.prob(sector, regime)),
        SimModel::Beta(params) => {
            if trials == 0 {
                return 0;
            }
            let (s1, s2) = params.shapes(sector, regime);
            let p = sample_beta(rng, s1, s2);
            sample_binomial(rng, trials, p)
        }
    }
}

/// One period of the chain.
pub fn step<R: Rng + ?Sized>(rng: &mut R, model: &SimModel, state: &SectorState) -> SectorState {
    let d1 = sample_defaults(rng, model, Sector::A, state.regime(Sector::A), state.x1);
    let d2 = sample_defaults(rng, model, Sector::B, state.regime(Sector::B), state.x2);
    state.advance(d1, d2)
}

fn path_from<R: Rng + ?Sized>(rng: &mut R, config: &SimConfig) -> Vec<SectorState> {
    let mut path = vec![config.initial];
    let mut state = config.initial;
    for _ in 0..config.max_steps {
        let stop = match config.stop {
            StopRule::MaxSteps => false,
            StopRule::NoSurvivors => state.x1 == 0 && state.x2 == 0,
            StopRule::NoDefaults => path.len() > 1 && state.y1 == 0 && state.y2 == 0,
        };
        if stop {
            break;
        }
        state = step(rng, &config.model, &state);
        path.push(state);
    }
    path
}

/// A single path on stream 0, starting at `config.initial`.
pub fn simulate_path(config: &SimConfig) -> Result<Vec<SectorState>> {
    config.validate()?;
    Ok(path_from(&mut config.rng(0), config))
}

/// Empirical (cycle length, severity) frequencies of `sector` over
/// `config.n_paths` crises started at `config.initial`.
pub fn monte_carlo_joint(config: &SimConfig, sector: Sector) -> Result<CrisisJointDist> {
    config.validate()?;
    if config.initial.y1 == 0 || config.initial.y2 == 0 {
        return Err(Error::Precondition(
            "a crisis needs initial defaults in both sectors".into(),
        ));
    }
    let x0 = config.initial.survivors(sector);
    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for path in 0..config.n_paths {
        let mut rng = config.rng(path as u64);
        let mut state = config.initial;
        let mut t = 0u32;
        loop {
            t += 1;
            state = step(&mut rng, &config.model, &state);
            if state.defaults(sector) == 0 {
                *counts.entry((t, x0 - state.survivors(sector))).or_insert(0) += 1;
                break;
            }
        }
    }
    let n = config.n_paths as f64;
    Ok(CrisisJointDist {
        sector,
        initial: config.initial,
        entries: counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect(),
    })
}

/// A panel of `n_periods` transitions from one simulated path.
pub fn generate_panel(config: &SimConfig, n_periods: usize) -> Result<SectorPanel> {
    let cfg = SimConfig {
        max_steps: n_periods.max(1),
        stop: StopRule::MaxSteps,
        ..*config
    };
    cfg.validate()?;
    let mut path = path_from(&mut cfg.rng(0), &cfg);
    path.truncate(n_periods + 1);
    let s = config.initial;
    SectorPanel::new((s.x1 + s.y1, s.x2 + s.y2), path)
}

/// Independent episodes totalling `n_periods` transitions. An episode ends
/// once both sectors have run out of survivors, and the next one restarts
/// from `config.initial` on a fresh stream.
pub fn generate_episodes(config: &SimConfig, n_periods: usize) -> Result<Vec<SectorPanel>> {
    config.validate()?;
    let totals = (
        config.initial.x1 + config.initial.y1,
        config.initial.x2 + config.initial.y2,
    );
    let mut episodes = Vec::new();
    let mut remaining = n_periods;
    let mut stream = 0u64;
    while remaining > 0 {
        let mut rng = config.rng(stream);
        stream += 1;
        let mut path = vec![config.initial];
        let mut state = config.initial;
        while remaining > 0 && !(state.x1 == 0 && state.x2 == 0) {
            state = step(&mut rng, &config.model, &state);
            path.push(state);
            remaining -= 1;
        }
        if path.len() == 1 {
            return Err(Error::InvalidParameter(
                "initial state has no survivors to simulate".into(),
            ));
        }
        episodes.push(SectorPanel::new(totals, path)?);
    }
    Ok(episodes)
}
