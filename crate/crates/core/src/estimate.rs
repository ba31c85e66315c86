//! Likelihoods and parameter estimation.
//!
//! The log-likelihood of a panel is the sum over transitions `t -> t+1`
//! and over both sectors of the log-probability that `y_{t+1}` of the
//! `x_t` survivors default under the regime selected at `t`. For the
//! binomial model the maximizer is the regime-conditional default
//! frequency; the Beta-binomial model is fitted numerically.
//!
//! Every estimator accepts a slice of panels. Panels are treated as
//! independent episodes of the same chain, so their likelihoods multiply
//! and their sufficient statistics add.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BaselineParams, BetaRegimeParams, DefaultKernel, RegimeIndex, RegimeParams, Sector, SectorState};
use crate::optim::{nelder_mead, NelderMeadConfig};

/// Observed survivor/default counts of two sectors over `N + 1` periods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorPanel {
    totals: (u32, u32),
    periods: Vec<SectorState>,
}

impl SectorPanel {
    /// Validates non-emptiness, the initial totals and that survivors at each
    /// period split into the next period's survivors and defaults. Errors
    /// name the offending 0-based period.
    pub fn new(totals: (u32, u32), periods: Vec<SectorState>) -> Result<Self> {
        let first = periods.first().ok_or_else(|| Error::InvalidPanel {
            row: 0,
            reason: "panel has no periods".into(),
        })?;
        if u64::from(first.x1) + u64::from(first.y1) != u64::from(totals.0) {
            return Err(Error::InvalidPanel {
                row: 0,
                reason: format!(
                    "x1 + y1 = {} but N1 = {}",
                    u64::from(first.x1) + u64::from(first.y1),
                    totals.0
                ),
            });
        }
        if u64::from(first.x2) + u64::from(first.y2) != u64::from(totals.1) {
            return Err(Error::InvalidPanel {
                row: 0,
                reason: format!(
                    "x2 + y2 = {} but N2 = {}",
                    u64::from(first.x2) + u64::from(first.y2),
                    totals.1
                ),
            });
        }
        for (t, pair) in periods.windows(2).enumerate() {
            let (prev, next) = (&pair[0], &pair[1]);
            if u64::from(next.x1) + u64::from(next.y1) != u64::from(prev.x1) {
                return Err(Error::InvalidPanel {
                    row: t + 1,
                    reason: format!("x1 + y1 = {} but previous x1 = {}", next.x1 + next.y1, prev.x1),
                });
            }
            if u64::from(next.x2) + u64::from(next.y2) != u64::from(prev.x2) {
                return Err(Error::InvalidPanel {
                    row: t + 1,
                    reason: format!("x2 + y2 = {} but previous x2 = {}", next.x2 + next.y2, prev.x2),
                });
            }
        }
        Ok(SectorPanel { totals, periods })
    }

    /// Builds a panel from each sector's total and per-period default counts;
    /// survivors follow as `x_0 = N - y_0`, `x_{t+1} = x_t - y_{t+1}`.
    pub fn from_defaults(totals: (u32, u32), defaults_a: &[u32], defaults_b: &[u32]) -> Result<Self> {
        if defaults_a.len() != defaults_b.len() {
            return Err(Error::InvalidPanel {
                row: defaults_a.len().min(defaults_b.len()),
                reason: format!("series lengths differ ({} vs {})", defaults_a.len(), defaults_b.len()),
            });
        }
        let survivors = |total: u32, defaults: &[u32], name: &str| -> Result<Vec<u32>> {
            let mut remaining = total;
            let mut out = Vec::with_capacity(defaults.len());
            for (t, &y) in defaults.iter().enumerate() {
                remaining = remaining.checked_sub(y).ok_or_else(|| Error::InvalidPanel {
                    row: t,
                    reason: format!("{name} defaults exceed the surviving bonds"),
                })?;
                out.push(remaining);
            }
            Ok(out)
        };
        let xa = survivors(totals.0, defaults_a, "sector A")?;
        let xb = survivors(totals.1, defaults_b, "sector B")?;
        let periods = (0..xa.len())
            .map(|t| SectorState::new(xa[t], defaults_a[t], xb[t], defaults_b[t]))
            .collect();
        SectorPanel::new(totals, periods)
    }

    pub fn totals(&self) -> (u32, u32) {
        self.totals
    }

    pub fn periods(&self) -> &[SectorState] {
        &self.periods
    }

    /// Number of observed transitions `N`.
    pub fn n_transitions(&self) -> usize {
        self.periods.len() - 1
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&SectorState, &SectorState)> {
        self.periods.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn defaults(&self, sector: Sector) -> Vec<u32> {
        self.periods.iter().map(|s| s.defaults(sector)).collect()
    }

    pub fn survivors(&self, sector: Sector) -> Vec<u32> {
        self.periods.iter().map(|s| s.survivors(sector)).collect()
    }

    /// The same panel with sectors A and B exchanged.
    pub fn swapped(&self) -> SectorPanel {
        SectorPanel {
            totals: (self.totals.1, self.totals.0),
            periods: self.periods.iter().map(SectorState::swapped).collect(),
        }
    }
}

/// Per-sector, per-regime sums of next-period defaults and current
/// survivors: the sufficient statistics of the binomial model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeTally {
    pub defaults: [[u64; 4]; 2],
    pub exposures: [[u64; 4]; 2],
    /// Transitions per regime, classified from sector A's viewpoint.
    pub transitions: [u64; 4],
}

fn sector_slot(sector: Sector) -> usize {
    match sector {
        Sector::A => 0,
        Sector::B => 1,
    }
}

impl RegimeTally {
    pub fn from_panels(panels: &[SectorPanel]) -> Self {
        let mut tally = RegimeTally::default();
        for panel in panels {
            for (now, next) in panel.transitions() {
                tally.transitions[now.regime(Sector::A).as_usize()] += 1;
                for sector in [Sector::A, Sector::B] {
                    let s = sector_slot(sector);
                    let r = now.regime(sector).as_usize();
                    tally.defaults[s][r] += u64::from(next.defaults(sector));
                    tally.exposures[s][r] += u64::from(now.survivors(sector));
                }
            }
        }
        tally
    }

    pub fn defaults(&self, sector: Sector, regime: RegimeIndex) -> u64 {
        self.defaults[sector_slot(sector)][regime.as_usize()]
    }

    pub fn exposure(&self, sector: Sector, regime: RegimeIndex) -> u64 {
        self.exposures[sector_slot(sector)][regime.as_usize()]
    }

    pub fn n_transitions(&self) -> u64 {
        self.transitions.iter().sum()
    }
}

/// Estimated parameters. `None` marks a regime whose survivors were never
/// exposed in the data, so the likelihood does not depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum FittedParams {
    Basic {
        a: [Option<f64>; 4],
        b: [Option<f64>; 4],
    },
    Baseline {
        alpha: [Option<f64>; 2],
        beta: [Option<f64>; 2],
    },
    Beta {
        a: [Option<(f64, f64)>; 4],
        b: [Option<(f64, f64)>; 4],
    },
}

fn require<T: Copy>(values: &[Option<T>], name: &str) -> Result<Vec<T>> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::InvalidParameter(format!("{name}_{i} was not estimated"))))
        .collect()
}

impl FittedParams {
    pub fn n_free(&self) -> usize {
        match self {
            FittedParams::Basic { a, b } => a.iter().chain(b).filter(|v| v.is_some()).count(),
            FittedParams::Baseline { alpha, beta } => alpha.iter().chain(beta).filter(|v| v.is_some()).count(),
            FittedParams::Beta { a, b } => 2 * a.iter().chain(b).filter(|v| v.is_some()).count(),
        }
    }

    /// Regime probabilities; fails if the model is not binomial or any
    /// parameter is absent.
    pub fn to_regime_params(&self) -> Result<RegimeParams> {
        match self {
            FittedParams::Basic { a, b } => {
                let (a, b) = (require(a, "a")?, require(b, "b")?);
                RegimeParams::new([a[0], a[1], a[2], a[3]], [b[0], b[1], b[2], b[3]])
            }
            FittedParams::Baseline { alpha, beta } => {
                let (al, be) = (require(alpha, "alpha")?, require(beta, "beta")?);
                Ok(BaselineParams::new(al[0], al[1], be[0], be[1])?.to_regime_params())
            }
            FittedParams::Beta { .. } => Err(Error::InvalidParameter(
                "Beta-binomial parameters are not regime probabilities".into(),
            )),
        }
    }

    pub fn to_beta_params(&self) -> Result<BetaRegimeParams> {
        match self {
            FittedParams::Beta { a, b } => {
                let (a, b) = (require(a, "A")?, require(b, "B")?);
                BetaRegimeParams::new([a[0], a[1], a[2], a[3]], [b[0], b[1], b[2], b[3]])
            }
            _ => Err(Error::InvalidParameter("not a Beta-binomial parameter set".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: FittedParams,
    pub log_likelihood: f64,
    /// Number of estimated free parameters.
    pub k: usize,
    /// Observation count used by BIC: the number of transitions.
    pub n_obs: usize,
    pub bic: f64,
    /// Transitions per regime, classified from sector A's viewpoint.
    pub regime_counts: [u64; 4],
    /// Numerical fits only: whether every sub-problem met its tolerance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub converged: Option<bool>,
}

/// `-2 ln L + k ln n`.
pub fn bic(log_likelihood: f64, k: usize, n_obs: usize) -> Result<f64> {
    if n_obs == 0 {
        return Err(Error::Domain("BIC needs at least one observation".into()));
    }
    Ok(-2.0 * log_likelihood + k as f64 * (n_obs as f64).ln())
}

/// Log-likelihood contribution of one sector.
pub fn sector_log_likelihood<K: DefaultKernel + ?Sized>(panels: &[SectorPanel], kernel: &K, sector: Sector) -> f64 {
    let mut total = 0.0;
    for panel in panels {
        for (now, next) in panel.transitions() {
            let trials = now.survivors(sector);
            if trials == 0 {
                continue;
            }
            total += kernel.ln_default_pmf(sector, now.regime(sector), trials, next.defaults(sector));
        }
    }
    total
}

/// Joint log-likelihood over several independent episodes.
pub fn log_likelihood_panels<K: DefaultKernel + ?Sized>(panels: &[SectorPanel], kernel: &K) -> f64 {
    sector_log_likelihood(panels, kernel, Sector::A) + sector_log_likelihood(panels, kernel, Sector::B)
}

/// Natural-log likelihood of a panel; `-inf` for an impossible observation.
pub fn log_likelihood<K: DefaultKernel + ?Sized>(panel: &SectorPanel, kernel: &K) -> f64 {
    log_likelihood_panels(std::slice::from_ref(panel), kernel)
}

fn check_not_empty(panels: &[SectorPanel]) -> Result<usize> {
    let n: usize = panels.iter().map(SectorPanel::n_transitions).sum();
    if n == 0 {
        return Err(Error::InsufficientData("the panel contains no transitions".into()));
    }
    Ok(n)
}

fn ratio(numerator: u64, denominator: u64) -> Option<f64> {
    (denominator > 0).then(|| numerator as f64 / denominator as f64)
}

fn finish_report(
    params: FittedParams,
    log_likelihood: f64,
    n_obs: usize,
    tally: &RegimeTally,
    converged: Option<bool>,
) -> Result<FitReport> {
    let k = params.n_free();
    Ok(FitReport {
        bic: bic(log_likelihood, k, n_obs)?,
        params,
        log_likelihood,
        k,
        n_obs,
        regime_counts: tally.transitions,
        converged,
    })
}

/// Closed-form estimates `â_i = Σ y_{t+1} h_i / Σ x_t h_i` over pooled episodes.
pub fn mle_from_tally(tally: &RegimeTally) -> ([Option<f64>; 4], [Option<f64>; 4]) {
    let est = |sector| RegimeIndex::ALL.map(|r| ratio(tally.defaults(sector, r), tally.exposure(sector, r)));
    (est(Sector::A), est(Sector::B))
}

/// Fills absent estimates with 0; such regimes carry no likelihood.
fn filled(values: [Option<f64>; 4]) -> [f64; 4] {
    values.map(|v| v.unwrap_or(0.0))
}

pub fn fit_mle_panels(panels: &[SectorPanel]) -> Result<FitReport> {
    let n_obs = check_not_empty(panels)?;
    let tally = RegimeTally::from_panels(panels);
    let (a, b) = mle_from_tally(&tally);
    let params = RegimeParams::new(filled(a), filled(b))?;
    let ll = log_likelihood_panels(panels, &params);
    finish_report(FittedParams::Basic { a, b }, ll, n_obs, &tally, None)
}

/// Closed-form maximum likelihood fit of the eight regime probabilities.
pub fn fit_mle(panel: &SectorPanel) -> Result<FitReport> {
    fit_mle_panels(std::slice::from_ref(panel))
}

pub fn fit_baseline_panels(panels: &[SectorPanel]) -> Result<FitReport> {
    let n_obs = check_not_empty(panels)?;
    let tally = RegimeTally::from_panels(panels);
    let pooled = |sector| {
        let quiet = RegimeIndex::ALL[0];
        let active = &RegimeIndex::ALL[1..];
        [
            ratio(tally.defaults(sector, quiet), tally.exposure(sector, quiet)),
            ratio(
                active.iter().map(|&r| tally.defaults(sector, r)).sum(),
                active.iter().map(|&r| tally.exposure(sector, r)).sum(),
            ),
        ]
    };
    let (alpha, beta) = (pooled(Sector::A), pooled(Sector::B));
    let params = BaselineParams::new(
        alpha[0].unwrap_or(0.0),
        alpha[1].unwrap_or(0.0),
        beta[0].unwrap_or(0.0),
        beta[1].unwrap_or(0.0),
    )?;
    let ll = log_likelihood_panels(panels, &params.to_regime_params());
    finish_report(FittedParams::Baseline { alpha, beta }, ll, n_obs, &tally, None)
}

/// Fit of the nested two-level comparison model (regimes 1-3 pooled).
pub fn fit_baseline(panel: &SectorPanel) -> Result<FitReport> {
    fit_baseline_panels(std::slice::from_ref(panel))
}

/// Settings for the Beta-binomial fit.
#[derive(Debug, Clone, Copy)]
pub struct BetaFitConfig {
    pub restarts: usize,
    pub max_evals: usize,
    pub f_tol: f64,
}

impl Default for BetaFitConfig {
    fn default() -> Self {
        BetaFitConfig {
            restarts: 5,
            max_evals: 10_000,
            f_tol: 1e-8,
        }
    }
}

/// Log-shape box for the optimizer: shapes between about 6e-6 and 5e8.
const LOG_SHAPE_MIN: f64 = -12.0;
const LOG_SHAPE_MAX: f64 = 20.0;

/// Observed `(trials, defaults) -> multiplicity` for one sector and regime.
fn regime_observations(panels: &[SectorPanel], sector: Sector, regime: RegimeIndex) -> BTreeMap<(u32, u32), u64> {
    let mut obs = BTreeMap::new();
    for panel in panels {
        for (now, next) in panel.transitions() {
            let trials = now.survivors(sector);
            if trials > 0 && now.regime(sector) == regime {
                *obs.entry((trials, next.defaults(sector))).or_insert(0) += 1;
            }
        }
    }
    obs
}

fn beta_block_nll(obs: &BTreeMap<(u32, u32), u64>, log_shapes: &[f64]) -> f64 {
    if log_shapes.iter().any(|v| !(LOG_SHAPE_MIN..=LOG_SHAPE_MAX).contains(v)) {
        return f64::INFINITY;
    }
    let (s1, s2) = (log_shapes[0].exp(), log_shapes[1].exp());
    let mut nll = 0.0;
    for (&(trials, defaults), &count) in obs {
        nll -= count as f64 * crate::model::ln_beta_binomial_pmf_unchecked(trials, defaults, s1, s2);
    }
    nll
}

/// Fit one regime's Beta shapes: restarts at increasing concentrations around
/// the pooled default frequency, best objective wins.
fn fit_beta_block(obs: &BTreeMap<(u32, u32), u64>, config: &BetaFitConfig) -> ((f64, f64), bool) {
    let (defaults, trials) = obs.iter().fold((0u64, 0u64), |(d, n), (&(x, y), &c)| {
        (d + c * u64::from(y), n + c * u64::from(x))
    });
    let p = ((defaults as f64 + 0.5) / (trials as f64 + 1.0)).clamp(1e-6, 1.0 - 1e-6);
    let nm = NelderMeadConfig {
        max_evals: config.max_evals,
        f_tol: config.f_tol,
        initial_step: 0.5,
    };
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for restart in 0..config.restarts.max(1) {
        let kappa = 10f64.powi(restart as i32);
        let start =
            [(p * kappa).ln(), ((1.0 - p) * kappa).ln()].map(|v| v.clamp(LOG_SHAPE_MIN + 0.5, LOG_SHAPE_MAX - 0.5));
        let m = nelder_mead(|v| beta_block_nll(obs, v), &start, &nm);
        if best.as_ref().is_none_or(|(_, f, _)| m.value < *f) {
            best = Some((m.x, m.value, m.converged));
        }
    }
    let (x, _, converged) = best.expect("at least one restart");
    ((x[0].exp(), x[1].exp()), converged)
}

pub fn fit_beta_mle_panels(panels: &[SectorPanel], config: &BetaFitConfig) -> Result<FitReport> {
    let n_obs = check_not_empty(panels)?;
    let tally = RegimeTally::from_panels(panels);
    let mut shapes = [[(1.0, 1.0); 4]; 2];
    let mut converged = true;
    for sector in [Sector::A, Sector::B] {
        for regime in RegimeIndex::ALL {
            let obs = regime_observations(panels, sector, regime);
            if obs.is_empty() {
                return Err(Error::UnderIdentified { sector, regime });
            }
            let (fit, ok) = fit_beta_block(&obs, config);
            shapes[sector_slot(sector)][regime.as_usize()] = fit;
            converged &= ok;
        }
    }
    let params = BetaRegimeParams::new(shapes[0], shapes[1])?;
    let ll = log_likelihood_panels(panels, &params);
    finish_report(
        FittedParams::Beta {
            a: params.a.map(Some),
            b: params.b.map(Some),
        },
        ll,
        n_obs,
        &tally,
        Some(converged),
    )
}

/// Numerical maximum likelihood fit of the Beta-binomial model.
///
/// The log-likelihood separates into one term per (sector, regime), each
/// depending only on that regime's two shapes, so each pair is maximized on
/// its own over log-shapes with Nelder-Mead.
pub fn fit_beta_mle(panel: &SectorPanel) -> Result<FitReport> {
    fit_beta_mle_panels(std::slice::from_ref(panel), &BetaFitConfig::default())
}

/// Pearson correlation matrix of equal-length series.
pub fn sector_correlations(series: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let len = series.first().map(Vec::len).unwrap_or(0);
    if len < 2 {
        return Err(Error::InsufficientData(
            "correlations need series of length >= 2".into(),
        ));
    }
    if let Some(bad) = series.iter().position(|s| s.len() != len) {
        return Err(Error::InsufficientData(format!(
            "series {bad} has length {} instead of {len}",
            series[bad].len()
        )));
    }
    let centred: Vec<Vec<f64>> = series
        .iter()
        .map(|s| {
            let mean = s.iter().sum::<f64>() / len as f64;
            s.iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centred
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let m = series.len();
    let mut corr = vec![vec![1.0; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                return Err(Error::UndefinedCorrelation(i, j));
            }
            let dot: f64 = centred[i].iter().zip(&centred[j]).map(|(u, v)| u * v).sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }
    Ok(corr)
}

/// For each sector, the partner with the largest correlation magnitude;
/// ties go to the lower index.
pub fn pair_sectors(corr: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(corr.len());
    for (i, row) in corr.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (j, &r) in row.iter().enumerate() {
            if j == i {
                continue;
            }
            if best.is_none_or(|(_, b)| r.abs() > b) {
                best = Some((j, r.abs()));
            }
        }
        if let Some((j, _)) = best {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Maximized sector-A log-likelihood under pairing `a` minus that under
/// pairing `b`. Both panels must carry the same sector-A series; only the
/// sector-A term is compared since the partners' own series differ.
pub fn log_likelihood_ratio(panel_a: &SectorPanel, panel_b: &SectorPanel) -> Result<f64> {
    log_likelihood_ratio_panels(std::slice::from_ref(panel_a), std::slice::from_ref(panel_b))
}

pub fn log_likelihood_ratio_panels(panels_a: &[SectorPanel], panels_b: &[SectorPanel]) -> Result<f64> {
    let series = |panels: &[SectorPanel]| -> Vec<(u32, u32)> {
        panels
            .iter()
            .flat_map(|p| p.periods().iter().map(|s| (s.x1, s.y1)))
            .collect()
    };
    if series(panels_a) != series(panels_b) {
        return Err(Error::Precondition(
            "the two pairings do not share the sector-A series".into(),
        ));
    }
    let maximized = |panels: &[SectorPanel]| -> Result<f64> {
        let fit = fit_mle_panels(panels)?;
        let (a, b) = match fit.params {
            FittedParams::Basic { a, b } => (a, b),
            _ => unreachable!("fit_mle returns basic parameters"),
        };
        let params = RegimeParams::new(filled(a), filled(b))?;
        Ok(sector_log_likelihood(panels, &params, Sector::A))
    };
    Ok(maximized(panels_a)? - maximized(panels_b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_step_panel() -> SectorPanel {
        SectorPanel::new(
            (10, 5),
            vec![SectorState::new(10, 0, 5, 0), SectorState::new(8, 2, 5, 0)],
        )
        .unwrap()
    }

    #[test]
    fn panel_validation_names_rows() {
        let err = SectorPanel::new(
            (10, 5),
            vec![
                SectorState::new(10, 0, 5, 0),
                SectorState::new(8, 2, 5, 0),
                SectorState::new(7, 2, 5, 0),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidPanel { row: 2, .. }), "{err:?}");
        let err = SectorPanel::new((11, 5), vec![SectorState::new(10, 0, 5, 0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPanel { row: 0, .. }));
        assert!(SectorPanel::new((1, 1), vec![]).is_err());
    }

    #[test]
    fn from_defaults_builds_survivors() {
        let panel = SectorPanel::from_defaults((5, 4), &[1, 2, 0], &[0, 1, 1]).unwrap();
        assert_eq!(panel.survivors(Sector::A), vec![4, 2, 2]);
        assert_eq!(panel.survivors(Sector::B), vec![4, 3, 2]);
        assert!(SectorPanel::from_defaults((2, 4), &[1, 2], &[0, 1]).is_err());
    }

    #[test]
    fn single_transition_estimate() {
        let fit = fit_mle(&single_step_panel()).unwrap();
        let FittedParams::Basic { a, b } = fit.params else {
            panic!()
        };
        assert_eq!(a, [Some(0.2), None, None, None]);
        assert_eq!(b, [Some(0.0), None, None, None]);
        assert_eq!(fit.k, 2);
        assert_eq!(fit.n_obs, 1);
        assert_eq!(fit.regime_counts, [1, 0, 0, 0]);
        let base = fit_baseline(&single_step_panel()).unwrap();
        let FittedParams::Baseline { alpha, .. } = base.params else {
            panic!()
        };
        assert_eq!(alpha, [Some(0.2), None]);
    }

    #[test]
    fn empty_panel_is_insufficient() {
        let panel = SectorPanel::new((3, 3), vec![SectorState::new(2, 1, 3, 0)]).unwrap();
        assert!(matches!(fit_mle(&panel), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_baseline(&panel), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_beta_mle(&panel), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn likelihood_degenerate_cases() {
        let quiet = SectorPanel::from_defaults((4, 3), &[1, 0, 0], &[1, 0, 0]).unwrap();
        let zero = RegimeParams::new([0.0; 4], [0.0; 4]).unwrap();
        assert_eq!(log_likelihood(&quiet, &zero), 0.0);
        let busy = SectorPanel::from_defaults((4, 3), &[1, 1, 0], &[1, 0, 0]).unwrap();
        assert_eq!(log_likelihood(&busy, &zero), f64::NEG_INFINITY);
    }

    #[test]
    fn beta_fit_requires_every_regime() {
        let err = fit_beta_mle(&single_step_panel()).unwrap_err();
        assert!(
            matches!(err, Error::UnderIdentified { sector: Sector::A, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn bic_values() {
        assert_eq!(bic(0.0, 0, 5).unwrap(), 0.0);
        assert!((bic(-10.0, 8, 100).unwrap() - 56.841_361_487_904_73).abs() < 1e-9);
        assert!(matches!(bic(-1.0, 1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn correlation_edge_cases() {
        let s = vec![1.0, 3.0, 2.0, 5.0];
        let neg: Vec<f64> = s.iter().map(|v| 2.75 * 2.0 - v).collect();
        let c = sector_correlations(&[s.clone(), s.clone(), neg]).unwrap();
        assert!((c[0][1] - 1.0).abs() < 1e-15);
        assert!((c[0][2] + 1.0).abs() < 1e-15);
        assert!(matches!(
            sector_correlations(&[s.clone(), vec![2.0; 4]]),
            Err(Error::UndefinedCorrelation(0, 1))
        ));
        assert!(sector_correlations(&[vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn pairing_ties_and_two_sectors() {
        assert_eq!(pair_sectors(&[vec![1.0, 0.3], vec![0.3, 1.0]]), vec![(0, 1), (1, 0)]);
        let tie = vec![vec![1.0, 0.5, 0.5], vec![0.5, 1.0, 0.2], vec![0.5, 0.2, 1.0]];
        assert_eq!(pair_sectors(&tie)[0], (0, 1));
    }

    #[test]
    fn identical_pairings_have_zero_ratio() {
        let panel = SectorPanel::from_defaults((20, 20), &[1, 2, 0, 1, 3], &[1, 0, 2, 1, 0]).unwrap();
        assert_eq!(log_likelihood_ratio(&panel, &panel).unwrap(), 0.0);
        let other = SectorPanel::from_defaults((20, 20), &[1, 2, 0, 1, 2], &[1, 0, 2, 1, 0]).unwrap();
        assert!(matches!(
            log_likelihood_ratio(&panel, &other),
            Err(Error::Precondition(_))
        ));
    }
}
