//! Joint law of the default cycle `T` and severity `W_T` of one sector.
//!
//! A crisis starts with defaults in both sectors. The tracked sector's
//! cycle ends at the first period with no new defaults; its severity is the
//! number of defaults in `(0, T]`, so initial defaults are not counted.
//!
//! `P_n(x1, x2, h)` is the probability that the tracked sector has had
//! defaults in every period up to `n`, that the survivor counts at `n` are
//! `(x1, x2)`, and that the other sector's default indicator at `n` is `h`.
//! Each layer is obtained from the previous one by summing over all
//! survivor counts `s_own > x_own` (the tracked sector must default) and
//! `s_other >= x_other` (with `h = 1` exactly when `s_other > x_other`).
//! The other sector's transition is applied first, then the tracked
//! sector's, so a step costs `O(x1 · x2 · (x1 + x2))` on a dense grid
//! rather than the `O(x1² · x2²)` of the double sum.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{transition_pmf, BetaRegimeParams, DefaultKernel, RegimeIndex, RegimeParams, Sector, SectorState};

/// Largest per-sector survivor count accepted by [`brute_force_joint`].
pub const BRUTE_FORCE_MAX_SURVIVORS: u32 = 6;

/// Key of a crisis layer: survivors of sector A, survivors of sector B and
/// the indicator that the non-tracked sector defaulted in the latest period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LayerKey {
    pub x1: u32,
    pub x2: u32,
    pub h: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrisisLayer {
    pub n: u32,
    pub sector: Sector,
    pub entries: BTreeMap<LayerKey, f64>,
}

impl CrisisLayer {
    /// The point mass `P_0(x1_0, x2_0, 1) = 1`.
    pub fn initial(initial: &SectorState, sector: Sector) -> Result<Self> {
        check_crisis_start(initial)?;
        let mut entries = BTreeMap::new();
        entries.insert(
            LayerKey {
                x1: initial.x1,
                x2: initial.x2,
                h: true,
            },
            1.0,
        );
        Ok(CrisisLayer { n: 0, sector, entries })
    }

    pub fn get(&self, x1: u32, x2: u32, h: bool) -> f64 {
        self.entries.get(&LayerKey { x1, x2, h }).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn own_other(&self, key: &LayerKey) -> (u32, u32) {
        match self.sector {
            Sector::A => (key.x1, key.x2),
            Sector::B => (key.x2, key.x1),
        }
    }

    fn key(&self, own: u32, other: u32, h: bool) -> LayerKey {
        match self.sector {
            Sector::A => LayerKey { x1: own, x2: other, h },
            Sector::B => LayerKey { x1: other, x2: own, h },
        }
    }
}

fn check_crisis_start(initial: &SectorState) -> Result<()> {
    if initial.y1 == 0 || initial.y2 == 0 {
        return Err(Error::Precondition(format!(
            "a crisis needs initial defaults in both sectors, got y0 = ({}, {})",
            initial.y1, initial.y2
        )));
    }
    Ok(())
}

/// Regime of the tracked sector while it is defaulting: 1 when the other
/// sector was quiet, 3 otherwise.
fn own_regime(h: bool) -> RegimeIndex {
    RegimeIndex::ALL[if h { 3 } else { 1 }]
}

/// Regime of the other sector while the tracked one is defaulting.
fn other_regime(h: bool) -> RegimeIndex {
    RegimeIndex::ALL[if h { 3 } else { 2 }]
}

/// Memoized pmf rows `d -> pmf(trials, d)` per (sector, regime, trials).
struct PmfCache<'k, K: ?Sized> {
    kernel: &'k K,
    rows: HashMap<(Sector, RegimeIndex, u32), Vec<f64>>,
}

impl<'k, K: DefaultKernel + ?Sized> PmfCache<'k, K> {
    fn new(kernel: &'k K) -> Self {
        PmfCache {
            kernel,
            rows: HashMap::new(),
        }
    }

    fn row(&mut self, sector: Sector, regime: RegimeIndex, trials: u32) -> &[f64] {
        let kernel = self.kernel;
        self.rows.entry((sector, regime, trials)).or_insert_with(|| {
            (0..=trials)
                .map(|d| kernel.default_pmf(sector, regime, trials, d))
                .collect()
        })
    }
}

/// Dense layer in (tracked, other) orientation, indexed `[h][own][other]`.
#[derive(Clone)]
struct Grid {
    n: u32,
    own_max: usize,
    other_max: usize,
    data: Vec<f64>,
}

impl Grid {
    fn zeros(n: u32, own_max: usize, other_max: usize) -> Self {
        Grid {
            n,
            own_max,
            other_max,
            data: vec![0.0; 2 * (own_max + 1) * (other_max + 1)],
        }
    }

    fn idx(&self, h: bool, own: usize, other: usize) -> usize {
        (usize::from(h) * (self.own_max + 1) + own) * (self.other_max + 1) + other
    }

    fn is_empty(&self) -> bool {
        self.data.iter().all(|&p| p == 0.0)
    }

    fn from_layer(layer: &CrisisLayer, own_max: usize, other_max: usize) -> Self {
        let mut grid = Grid::zeros(layer.n, own_max, other_max);
        for (key, &p) in &layer.entries {
            let (own, other) = layer.own_other(key);
            let i = grid.idx(key.h, own as usize, other as usize);
            grid.data[i] += p;
        }
        grid
    }

    fn to_layer(&self, sector: Sector) -> CrisisLayer {
        let mut layer = CrisisLayer {
            n: self.n,
            sector,
            entries: BTreeMap::new(),
        };
        for h in [false, true] {
            for own in 0..=self.own_max {
                for other in 0..=self.other_max {
                    let p = self.data[self.idx(h, own, other)];
                    if p != 0.0 {
                        let key = layer.key(own as u32, other as u32, h);
                        layer.entries.insert(key, p);
                    }
                }
            }
        }
        layer
    }
}

fn step_grid<K: DefaultKernel + ?Sized>(prev: &Grid, sector: Sector, cache: &mut PmfCache<'_, K>) -> Grid {
    let (own_max, other_max) = (prev.own_max, prev.other_max);
    let other = sector.other();

    // Other sector's move: mid[h_prev][h_new][s_own][x_other].
    let mid_idx = |h_prev: bool, h_new: bool, s_own: usize, x_other: usize| {
        ((usize::from(h_prev) * 2 + usize::from(h_new)) * (own_max + 1) + s_own) * (other_max + 1) + x_other
    };
    let mut mid = vec![0.0; 4 * (own_max + 1) * (other_max + 1)];
    for h_prev in [false, true] {
        for s_other in 0..=other_max {
            let row = cache.row(other, other_regime(h_prev), s_other as u32);
            // A tracked sector without survivors cannot default again.
            for s_own in 1..=own_max {
                let p = prev.data[prev.idx(h_prev, s_own, s_other)];
                if p == 0.0 {
                    continue;
                }
                for (d_other, &q) in row.iter().enumerate() {
                    if q != 0.0 {
                        mid[mid_idx(h_prev, d_other > 0, s_own, s_other - d_other)] += p * q;
                    }
                }
            }
        }
    }

    // Tracked sector's move; at least one default keeps the crisis going.
    let mut next = Grid::zeros(prev.n + 1, own_max, other_max);
    for h_prev in [false, true] {
        for s_own in 1..=own_max {
            let row = cache.row(sector, own_regime(h_prev), s_own as u32);
            for h_new in [false, true] {
                for x_other in 0..=other_max {
                    let m = mid[mid_idx(h_prev, h_new, s_own, x_other)];
                    if m == 0.0 {
                        continue;
                    }
                    for (d_own, &q) in row.iter().enumerate().skip(1) {
                        if q != 0.0 {
                            let i = next.idx(h_new, s_own - d_own, x_other);
                            next.data[i] += m * q;
                        }
                    }
                }
            }
        }
    }
    next
}

fn layer_bounds(layer: &CrisisLayer) -> (usize, usize) {
    layer.entries.keys().fold((0, 0), |(o, t), key| {
        let (own, other) = layer.own_other(key);
        (o.max(own as usize), t.max(other as usize))
    })
}

fn initial_grid(initial: &SectorState, sector: Sector) -> Result<Grid> {
    let layer = CrisisLayer::initial(initial, sector)?;
    let (own_max, other_max) = layer_bounds(&layer);
    Ok(Grid::from_layer(&layer, own_max, other_max))
}

/// Advance a crisis layer one period under any default kernel.
pub fn crisis_layer_step_with<K: DefaultKernel + ?Sized>(prev: &CrisisLayer, kernel: &K) -> CrisisLayer {
    let (own_max, other_max) = layer_bounds(prev);
    let grid = Grid::from_layer(prev, own_max, other_max);
    step_grid(&grid, prev.sector, &mut PmfCache::new(kernel)).to_layer(prev.sector)
}

/// Advance a crisis layer one period under the basic binomial model.
pub fn crisis_layer_step(prev: &CrisisLayer, params: &RegimeParams) -> CrisisLayer {
    crisis_layer_step_with(prev, params)
}

/// Advance a crisis layer one period under the Beta-binomial model.
pub fn crisis_layer_step_beta(prev: &CrisisLayer, params: &BetaRegimeParams) -> CrisisLayer {
    crisis_layer_step_with(prev, params)
}

/// All non-empty layers `P_0, P_1, ...` of a crisis.
pub fn crisis_layers<K: DefaultKernel + ?Sized>(
    kernel: &K,
    initial: &SectorState,
    sector: Sector,
) -> Result<Vec<CrisisLayer>> {
    let mut cache = PmfCache::new(kernel);
    let mut grid = initial_grid(initial, sector)?;
    let mut layers = Vec::new();
    while !grid.is_empty() {
        layers.push(grid.to_layer(sector));
        grid = step_grid(&grid, sector, &mut cache);
    }
    Ok(layers)
}

/// Probability table over (cycle length, severity) for one sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrisisJointDist {
    pub sector: Sector,
    pub initial: SectorState,
    pub entries: BTreeMap<(u32, u32), f64>,
}

impl CrisisJointDist {
    pub fn get(&self, cycle_length: u32, severity: u32) -> f64 {
        self.entries.get(&(cycle_length, severity)).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.entries.iter().map(|(&(n, w), &p)| (n, w, p))
    }

    /// Distribution of the cycle length alone.
    pub fn cycle_marginal(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (n, _, p) in self.iter() {
            *out.entry(n).or_insert(0.0) += p;
        }
        out
    }

    /// Distribution of the severity alone.
    pub fn severity_marginal(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (_, w, p) in self.iter() {
            *out.entry(w).or_insert(0.0) += p;
        }
        out
    }

    /// Largest absolute entry-wise difference against another table.
    pub fn max_abs_diff(&self, other: &CrisisJointDist) -> f64 {
        let mut keys: Vec<_> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|(n, w)| (self.get(n, w) - other.get(n, w)).abs())
            .fold(0.0, f64::max)
    }

    /// Total-variation distance `½ Σ |p - q|`.
    pub fn total_variation(&self, other: &CrisisJointDist) -> f64 {
        let mut keys: Vec<_> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .into_iter()
            .map(|(n, w)| (self.get(n, w) - other.get(n, w)).abs())
            .sum::<f64>()
    }
}

/// Joint table from the layer recursion: the cycle ends at `n` with
/// severity `w` when layer `n - 1` holds `x_own0 - w` survivors and none of
/// them defaults at `n`.
pub fn joint_cycle_severity_with<K: DefaultKernel + ?Sized>(
    kernel: &K,
    initial: &SectorState,
    sector: Sector,
) -> Result<CrisisJointDist> {
    check_crisis_start(initial)?;
    let x0 = initial.survivors(sector);
    let mut cache = PmfCache::new(kernel);
    let mut entries = BTreeMap::new();
    let mut grid = initial_grid(initial, sector)?;
    // Layers vanish after x0 steps, so this runs at most x0 + 1 times.
    while !grid.is_empty() {
        for h in [false, true] {
            for x_own in 0..=grid.own_max {
                let mass: f64 = (0..=grid.other_max).map(|o| grid.data[grid.idx(h, x_own, o)]).sum();
                if mass == 0.0 {
                    continue;
                }
                let q = cache.row(sector, own_regime(h), x_own as u32)[0];
                if q != 0.0 {
                    *entries.entry((grid.n + 1, x0 - x_own as u32)).or_insert(0.0) += mass * q;
                }
            }
        }
        grid = step_grid(&grid, sector, &mut cache);
    }
    Ok(CrisisJointDist {
        sector,
        initial: *initial,
        entries,
    })
}

pub fn joint_cycle_severity(params: &RegimeParams, initial: &SectorState, sector: Sector) -> Result<CrisisJointDist> {
    joint_cycle_severity_with(params, initial, sector)
}

pub fn joint_cycle_severity_beta(
    params: &BetaRegimeParams,
    initial: &SectorState,
    sector: Sector,
) -> Result<CrisisJointDist> {
    joint_cycle_severity_with(params, initial, sector)
}

/// Test oracle: expands the full two-sector state tree with the one-step
/// transition kernel until the tracked sector records a period without
/// defaults. Exponential in the survivor counts, so both are capped at
/// [`BRUTE_FORCE_MAX_SURVIVORS`].
pub fn brute_force_joint<K: DefaultKernel + ?Sized>(
    kernel: &K,
    initial: &SectorState,
    sector: Sector,
) -> Result<CrisisJointDist> {
    if initial.x1 > BRUTE_FORCE_MAX_SURVIVORS || initial.x2 > BRUTE_FORCE_MAX_SURVIVORS {
        return Err(Error::StateSpaceTooLarge(format!(
            "brute-force enumeration limited to {BRUTE_FORCE_MAX_SURVIVORS} survivors per sector, got ({}, {})",
            initial.x1, initial.x2
        )));
    }
    if initial.defaults(sector) == 0 {
        return Err(Error::Precondition(format!("sector {sector} has no initial defaults")));
    }
    let x0 = initial.survivors(sector);
    let mut entries = BTreeMap::new();
    let mut frontier: BTreeMap<SectorState, f64> = BTreeMap::from([(*initial, 1.0)]);
    let mut t = 0u32;
    while !frontier.is_empty() {
        t += 1;
        let mut next = BTreeMap::new();
        for (state, p) in &frontier {
            for (succ, q) in transition_pmf(state, kernel) {
                if q == 0.0 {
                    continue;
                }
                if succ.defaults(sector) == 0 {
                    *entries.entry((t, x0 - succ.survivors(sector))).or_insert(0.0) += p * q;
                } else {
                    *next.entry(succ).or_insert(0.0) += p * q;
                }
            }
        }
        frontier = next;
    }
    Ok(CrisisJointDist {
        sector,
        initial: *initial,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3_b3(a3: f64, b3: f64) -> RegimeParams {
        RegimeParams::new([0.0, 0.0, 0.0, a3], [0.0, 0.0, 0.0, b3]).unwrap()
    }

    #[test]
    fn first_layer_small_case() {
        let start = SectorState::new(1, 1, 1, 1);
        let layer0 = CrisisLayer::initial(&start, Sector::A).unwrap();
        let layer1 = crisis_layer_step(&layer0, &a3_b3(0.3, 0.2));
        assert!((layer1.get(0, 1, false) - 0.24).abs() < 1e-15);
        assert!((layer1.get(0, 0, true) - 0.06).abs() < 1e-15);
        assert_eq!(layer1.entries.len(), 2);
    }

    #[test]
    fn zero_infection_ends_crisis_immediately() {
        let start = SectorState::new(3, 2, 4, 1);
        let layer0 = CrisisLayer::initial(&start, Sector::A).unwrap();
        assert!(crisis_layer_step(&layer0, &a3_b3(0.0, 0.7)).is_empty());
    }

    #[test]
    fn layers_vanish_past_survivor_count() {
        let p = RegimeParams::new([0.5; 4], [0.5; 4]).unwrap();
        let layers = crisis_layers(&p, &SectorState::new(3, 1, 2, 1), Sector::A).unwrap();
        assert!(layers.len() <= 4);
        assert!(layers.iter().all(|l| l.n <= 3));
    }

    #[test]
    fn requires_defaults_in_both_sectors() {
        let p = a3_b3(0.3, 0.2);
        assert!(matches!(
            joint_cycle_severity(&p, &SectorState::new(1, 0, 1, 1), Sector::A),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            CrisisLayer::initial(&SectorState::new(1, 1, 1, 0), Sector::B),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn small_joint_table() {
        let joint = joint_cycle_severity(&a3_b3(0.3, 0.2), &SectorState::new(1, 1, 1, 1), Sector::A).unwrap();
        assert_eq!(joint.entries.len(), 2);
        assert!((joint.get(1, 0) - 0.7).abs() < 1e-15);
        assert!((joint.get(2, 1) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn no_survivors_means_unit_mass_at_one() {
        let p = RegimeParams::new([0.4; 4], [0.4; 4]).unwrap();
        let start = SectorState::new(0, 2, 3, 1);
        let joint = joint_cycle_severity(&p, &start, Sector::A).unwrap();
        assert_eq!(joint.entries, BTreeMap::from([((1, 0), 1.0)]));
        assert_eq!(brute_force_joint(&p, &start, Sector::A).unwrap().entries, joint.entries);
    }

    #[test]
    fn certain_default_ends_at_two() {
        let p = a3_b3(1.0, 1.0);
        let start = SectorState::new(2, 1, 2, 1);
        let oracle = brute_force_joint(&p, &start, Sector::A).unwrap();
        assert_eq!(oracle.entries, BTreeMap::from([((2, 2), 1.0)]));
        let joint = joint_cycle_severity(&p, &start, Sector::A).unwrap();
        assert_eq!(joint.entries, oracle.entries);
    }

    #[test]
    fn beta_uniform_small_case() {
        let beta = BetaRegimeParams::new([(1.0, 1.0); 4], [(1.0, 1.0); 4]).unwrap();
        let start = SectorState::new(1, 1, 1, 1);
        let layer1 = crisis_layer_step_beta(&CrisisLayer::initial(&start, Sector::A).unwrap(), &beta);
        assert!((layer1.get(0, 1, false) - 0.25).abs() < 1e-14);
        assert!((layer1.get(0, 0, true) - 0.25).abs() < 1e-14);
        let joint = joint_cycle_severity_beta(&beta, &start, Sector::A).unwrap();
        assert!((joint.get(1, 0) - 0.5).abs() < 1e-14);
        assert!((joint.get(2, 1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn beta_without_survivors() {
        let beta = BetaRegimeParams::new([(2.0, 3.0); 4], [(0.5, 4.0); 4]).unwrap();
        let start = SectorState::new(0, 1, 2, 1);
        let layer1 = crisis_layer_step_beta(&CrisisLayer::initial(&start, Sector::A).unwrap(), &beta);
        assert!(layer1.is_empty());
        let joint = joint_cycle_severity_beta(&beta, &start, Sector::A).unwrap();
        assert_eq!(joint.entries, BTreeMap::from([((1, 0), 1.0)]));
    }

    #[test]
    fn brute_force_guard() {
        let p = a3_b3(0.3, 0.2);
        assert!(matches!(
            brute_force_joint(&p, &SectorState::new(7, 1, 1, 1), Sector::A),
            Err(Error::StateSpaceTooLarge(_))
        ));
    }

    #[test]
    fn sector_b_matches_swapped_sector_a() {
        let p = RegimeParams::new([0.05, 0.2, 0.3, 0.45], [0.1, 0.35, 0.15, 0.5]).unwrap();
        let start = SectorState::new(4, 2, 3, 1);
        let b = joint_cycle_severity(&p, &start, Sector::B).unwrap();
        let a_swapped = joint_cycle_severity(&p.swapped(), &start.swapped(), Sector::A).unwrap();
        assert!(b.max_abs_diff(&a_swapped) < 1e-15);
    }
}
