//! Domain types, regime classification and one-step transition kernels.
//!
//! Sector A's default probability is selected by `regime_index(y1, y2)` and
//! sector B's by `regime_index(y2, y1)`: each sector looks at its own
//! defaults first. With that convention, `b[1]` applies when only sector B
//! defaulted and `b[2]` when only sector A defaulted.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    A,
    B,
}

impl Sector {
    pub fn other(self) -> Sector {
        match self {
            Sector::A => Sector::B,
            Sector::B => Sector::A,
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::A => f.write_str("A"),
            Sector::B => f.write_str("B"),
        }
    }
}

/// Survivor and default counts of both sectors at one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SectorState {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
}

impl SectorState {
    pub fn new(x1: u32, y1: u32, x2: u32, y2: u32) -> Self {
        SectorState { x1, y1, x2, y2 }
    }

    /// Initial state from sector totals and initial default counts.
    pub fn from_totals(totals: (u32, u32), defaults: (u32, u32)) -> Result<Self> {
        if defaults.0 > totals.0 || defaults.1 > totals.1 {
            return Err(Error::InvalidParameter(format!(
                "initial defaults {defaults:?} exceed totals {totals:?}"
            )));
        }
        Ok(SectorState::new(
            totals.0 - defaults.0,
            defaults.0,
            totals.1 - defaults.1,
            defaults.1,
        ))
    }

    pub fn survivors(&self, sector: Sector) -> u32 {
        match sector {
            Sector::A => self.x1,
            Sector::B => self.x2,
        }
    }

    pub fn defaults(&self, sector: Sector) -> u32 {
        match sector {
            Sector::A => self.y1,
            Sector::B => self.y2,
        }
    }

    /// Regime that selects `sector`'s default probability for the next period.
    pub fn regime(&self, sector: Sector) -> RegimeIndex {
        regime_index(self.defaults(sector), self.defaults(sector.other()))
    }

    /// Successor reached when `d1` and `d2` survivors default.
    pub fn advance(&self, d1: u32, d2: u32) -> SectorState {
        debug_assert!(d1 <= self.x1 && d2 <= self.x2);
        SectorState::new(self.x1 - d1, d1, self.x2 - d2, d2)
    }

    /// Whether `next` can follow `self`: each sector's survivors split into
    /// the next period's survivors and defaults.
    pub fn is_successor(&self, next: &SectorState) -> bool {
        u64::from(next.x1) + u64::from(next.y1) == u64::from(self.x1)
            && u64::from(next.x2) + u64::from(next.y2) == u64::from(self.x2)
    }

    /// The same state with the two sectors' roles exchanged.
    pub fn swapped(&self) -> SectorState {
        SectorState::new(self.x2, self.y2, self.x1, self.y1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RegimeIndex(u8);

impl RegimeIndex {
    pub const ALL: [RegimeIndex; 4] = [RegimeIndex(0), RegimeIndex(1), RegimeIndex(2), RegimeIndex(3)];

    pub fn new(value: u8) -> Result<Self> {
        if value < 4 {
            Ok(RegimeIndex(value))
        } else {
            Err(Error::Domain(format!("regime index {value} outside 0..=3")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        usize::from(self.0)
    }
}

impl fmt::Display for RegimeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 0: no defaults anywhere; 1: only own sector; 2: only the other sector;
/// 3: both sectors.
pub fn regime_index(y_own: u32, y_other: u32) -> RegimeIndex {
    match (y_own > 0, y_other > 0) {
        (false, false) => RegimeIndex(0),
        (true, false) => RegimeIndex(1),
        (false, true) => RegimeIndex(2),
        (true, true) => RegimeIndex(3),
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")))
    }
}

/// Regime-switching default probabilities of the basic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

impl RegimeParams {
    pub fn new(a: [f64; 4], b: [f64; 4]) -> Result<Self> {
        for (i, p) in a.iter().enumerate() {
            check_probability(&format!("a_{i}"), *p)?;
        }
        for (i, p) in b.iter().enumerate() {
            check_probability(&format!("b_{i}"), *p)?;
        }
        Ok(RegimeParams { a, b })
    }

    pub fn prob(&self, sector: Sector, regime: RegimeIndex) -> f64 {
        match sector {
            Sector::A => self.a[regime.as_usize()],
            Sector::B => self.b[regime.as_usize()],
        }
    }

    /// Sector A default probability given last period's default counts.
    pub fn alpha(&self, y1: u32, y2: u32) -> f64 {
        self.a[regime_index(y1, y2).as_usize()]
    }

    /// Sector B default probability given last period's default counts.
    pub fn beta_prob(&self, y1: u32, y2: u32) -> f64 {
        self.b[regime_index(y2, y1).as_usize()]
    }

    pub fn swapped(&self) -> RegimeParams {
        RegimeParams { a: self.b, b: self.a }
    }
}

/// Beta shape pairs `(A_i1, A_i2)` and `(B_i1, B_i2)` per regime of the
/// generalized model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaRegimeParams {
    pub a: [(f64, f64); 4],
    pub b: [(f64, f64); 4],
}

impl BetaRegimeParams {
    pub fn new(a: [(f64, f64); 4], b: [(f64, f64); 4]) -> Result<Self> {
        for (name, shapes) in [("A", &a), ("B", &b)] {
            for (i, &(s1, s2)) in shapes.iter().enumerate() {
                if !(s1 > 0.0 && s2 > 0.0 && s1.is_finite() && s2.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "{name}_{i} = ({s1}, {s2}) must be positive and finite"
                    )));
                }
            }
        }
        Ok(BetaRegimeParams { a, b })
    }

    /// Beta shapes centred on the given probabilities with concentration
    /// `kappa`, i.e. `(p·kappa, (1-p)·kappa)`. Probabilities must lie in (0, 1).
    pub fn concentrated(params: &RegimeParams, kappa: f64) -> Result<Self> {
        let shape = |p: f64| (p * kappa, (1.0 - p) * kappa);
        BetaRegimeParams::new(params.a.map(shape), params.b.map(shape))
    }

    pub fn shapes(&self, sector: Sector, regime: RegimeIndex) -> (f64, f64) {
        match sector {
            Sector::A => self.a[regime.as_usize()],
            Sector::B => self.b[regime.as_usize()],
        }
    }

    /// Mean default probability `A_i1 / (A_i1 + A_i2)` of each regime.
    pub fn means(&self, sector: Sector) -> [f64; 4] {
        let shapes = match sector {
            Sector::A => &self.a,
            Sector::B => &self.b,
        };
        shapes.map(|(s1, s2)| s1 / (s1 + s2))
    }

    pub fn swapped(&self) -> BetaRegimeParams {
        BetaRegimeParams { a: self.b, b: self.a }
    }
}

/// Two-level comparison model: each sector has one probability for quiet
/// periods (no defaults in either sector) and one for all other periods.
/// It is the regime model with regimes 1, 2 and 3 sharing a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta0: f64,
    pub beta1: f64,
}

impl BaselineParams {
    pub fn new(alpha0: f64, alpha1: f64, beta0: f64, beta1: f64) -> Result<Self> {
        check_probability("alpha0", alpha0)?;
        check_probability("alpha1", alpha1)?;
        check_probability("beta0", beta0)?;
        check_probability("beta1", beta1)?;
        Ok(BaselineParams {
            alpha0,
            alpha1,
            beta0,
            beta1,
        })
    }

    pub fn to_regime_params(&self) -> RegimeParams {
        RegimeParams {
            a: [self.alpha0, self.alpha1, self.alpha1, self.alpha1],
            b: [self.beta0, self.beta1, self.beta1, self.beta1],
        }
    }
}

/// One-period default law of a single sector: the probability that
/// `defaults` of `trials` survivors default while `regime` is in force.
pub trait DefaultKernel {
    fn default_pmf(&self, sector: Sector, regime: RegimeIndex, trials: u32, defaults: u32) -> f64;

    fn ln_default_pmf(&self, sector: Sector, regime: RegimeIndex, trials: u32, defaults: u32) -> f64 {
        self.default_pmf(sector, regime, trials, defaults).ln()
    }
}

impl DefaultKernel for RegimeParams {
    fn default_pmf(&self, sector: Sector, regime: RegimeIndex, trials: u32, defaults: u32) -> f64 {
        binomial_pmf(trials, defaults, self.prob(sector, regime))
    }

    fn ln_default_pmf(&self, sector: Sector, regime: RegimeIndex, trials: u32, defaults: u32) -> f64 {
        ln_binomial_pmf(trials, defaults, self.prob(sector, regime))
    }
}

impl DefaultKernel for BetaRegimeParams {
    fn default_pmf(&self, sector: Sector, regime: RegimeIndex, trials: u32, defaults: u32) -> f64 {
        let (s1, s2) = self.shapes(sector, regime);
        beta_binomial_pmf_unchecked(trials, defaults, s1, s2)
    }

    fn ln_default_pmf(&self, sector: Sector, regime: RegimeIndex, trials: u32, defaults: u32) -> f64 {
        let (s1, s2) = self.shapes(sector, regime);
        ln_beta_binomial_pmf_unchecked(trials, defaults, s1, s2)
    }
}

impl DefaultKernel for BaselineParams {
    fn default_pmf(&self, sector: Sector, regime: RegimeIndex, trials: u32, defaults: u32) -> f64 {
        self.to_regime_params().default_pmf(sector, regime, trials, defaults)
    }
}

/// Binomial pmf with `0^0 = 1`; the coefficient is evaluated in log space.
pub fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    ln_binomial_pmf(n, k, p).exp()
}

/// Natural log of [`binomial_pmf`]; `-inf` for impossible outcomes.
pub fn ln_binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if n == 0 {
        return 0.0;
    }
    ln_binomial(u64::from(n), u64::from(k)) + f64::from(k) * p.ln() + f64::from(n - k) * (-p).ln_1p()
}

/// Natural log of the Beta function, via log-gamma.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "log_beta requires positive finite arguments, got ({a}, {b})"
        )));
    }
    Ok(ln_beta_unchecked(a, b))
}

fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Probability that `y_next` of `x` survivors default when the period's
/// default probability is drawn from `Beta(a1, a2)`.
pub fn beta_binomial_pmf(x: u32, y_next: u32, a1: f64, a2: f64) -> Result<f64> {
    if !(a1 > 0.0 && a2 > 0.0) || !a1.is_finite() || !a2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Beta shapes ({a1}, {a2}) must be positive"
        )));
    }
    if y_next > x {
        return Err(Error::Domain(format!("{y_next} defaults out of {x} survivors")));
    }
    Ok(beta_binomial_pmf_unchecked(x, y_next, a1, a2))
}

pub(crate) fn beta_binomial_pmf_unchecked(x: u32, y_next: u32, a1: f64, a2: f64) -> f64 {
    ln_beta_binomial_pmf_unchecked(x, y_next, a1, a2).exp()
}

pub(crate) fn ln_beta_binomial_pmf_unchecked(x: u32, y_next: u32, a1: f64, a2: f64) -> f64 {
    if y_next > x {
        return f64::NEG_INFINITY;
    }
    if x == 0 {
        return 0.0;
    }
    // B(y + a1, x - y + a2) / B(a1, a2) as a ratio of rising factorials, which
    // stays accurate when the shapes are large.
    ln_binomial(u64::from(x), u64::from(y_next)) + ln_rising(a1, y_next) + ln_rising(a2, x - y_next)
        - ln_rising(a1 + a2, x)
}

/// `ln Γ(a + k) - ln Γ(a)`. Differencing log-gamma values loses about
/// `ε · a ln a` absolutely, so large `a` uses the Stirling expansion of the
/// difference instead.
fn ln_rising(a: f64, k: u32) -> f64 {
    fn tail(z: f64) -> f64 {
        let z2 = z * z;
        (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * z2)) / z2) / z
    }
    if k <= 8 {
        return (0..k).map(|i| (a + f64::from(i)).ln()).sum();
    }
    let k = f64::from(k);
    if a >= 1e3 {
        (a - 0.5) * (k / a).ln_1p() + k * ((a + k).ln() - 1.0) + tail(a + k) - tail(a)
    } else {
        ln_gamma(a + k) - ln_gamma(a)
    }
}

/// Full one-step successor distribution of the joint chain. Conditional on
/// the current state the two sectors default independently.
pub fn transition_pmf<K: DefaultKernel + ?Sized>(state: &SectorState, kernel: &K) -> Vec<(SectorState, f64)> {
    let regime_a = state.regime(Sector::A);
    let regime_b = state.regime(Sector::B);
    let pmf_a: Vec<f64> = (0..=state.x1)
        .map(|d| kernel.default_pmf(Sector::A, regime_a, state.x1, d))
        .collect();
    let pmf_b: Vec<f64> = (0..=state.x2)
        .map(|d| kernel.default_pmf(Sector::B, regime_b, state.x2, d))
        .collect();
    let mut out = Vec::with_capacity(pmf_a.len() * pmf_b.len());
    for (d1, pa) in pmf_a.iter().enumerate() {
        for (d2, pb) in pmf_b.iter().enumerate() {
            out.push((state.advance(d1 as u32, d2 as u32), pa * pb));
        }
    }
    out
}
