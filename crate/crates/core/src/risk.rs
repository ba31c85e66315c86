//! Crisis loss distributions and the CRVaR / CRES measures.

use serde::Serialize;

use crate::crisis_dist::CrisisJointDist;
use crate::error::{Error, Result};

/// Maps a crisis outcome to a loss.
pub trait LossSpec {
    fn loss(&self, severity: u32, cycle_length: u32) -> f64;
}

impl<F: Fn(u32, u32) -> f64> LossSpec for F {
    fn loss(&self, severity: u32, cycle_length: u32) -> f64 {
        self(severity, cycle_length)
    }
}

/// Hypothetical loss table indexed by (severity, cycle length):
/// `L(0, t) = t - 1 + 0.1` and `L(w, t) = L(0, t) + w - 1` for `w >= 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Eq8Loss;

impl LossSpec for Eq8Loss {
    fn loss(&self, severity: u32, cycle_length: u32) -> f64 {
        eq8_value(severity, cycle_length)
    }
}

// Written as a single subtraction from an exact integer so outcomes with the
// same `w + t` share a bit-identical loss and merge in the pushforward.
fn eq8_value(severity: u32, cycle_length: u32) -> f64 {
    if severity == 0 {
        f64::from(cycle_length) - 0.9
    } else {
        (f64::from(severity) + f64::from(cycle_length)) - 1.9
    }
}

pub fn loss_eq8(severity: u32, cycle_length: u32) -> Result<f64> {
    if cycle_length < 1 {
        return Err(Error::Domain("cycle length must be at least 1".into()));
    }
    Ok(eq8_value(severity, cycle_length))
}

/// Finite loss distribution sorted by loss value with distinct support points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossDistribution {
    entries: Vec<(f64, f64)>,
}

impl LossDistribution {
    /// Sorts the points and merges equal loss values. Rejects empty input,
    /// non-finite losses and negative or non-finite probabilities.
    pub fn new(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut points: Vec<(f64, f64)> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty loss distribution".into()));
        }
        if let Some(&(l, p)) = points
            .iter()
            .find(|(l, p)| !l.is_finite() || !p.is_finite() || *p < 0.0)
        {
            return Err(Error::InvalidParameter(format!("invalid loss point ({l}, {p})")));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for (l, p) in points {
            match entries.last_mut() {
                Some(last) if last.0 == l => last.1 += p,
                _ => entries.push((l, p)),
            }
        }
        Ok(LossDistribution { entries })
    }

    pub fn point_mass(loss: f64) -> Result<Self> {
        LossDistribution::new([(loss, 1.0)])
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// `P(L > l)` for each support point, accumulated from the top.
    fn exceedances(&self) -> Vec<f64> {
        let mut tail = vec![0.0; self.entries.len()];
        let mut acc = 0.0;
        for i in (0..self.entries.len()).rev() {
            tail[i] = acc;
            acc += self.entries[i].1;
        }
        tail
    }
}

/// Pushforward of a crisis table through a loss function.
pub fn loss_distribution<L: LossSpec + ?Sized>(joint: &CrisisJointDist, loss: &L) -> Result<LossDistribution> {
    LossDistribution::new(joint.iter().map(|(n, w, p)| (loss.loss(w, n), p)))
}

fn check_level(beta_level: f64) -> Result<()> {
    if beta_level > 0.0 && beta_level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability level {beta_level} outside (0, 1)")))
    }
}

fn crvar_index(dist: &LossDistribution, beta_level: f64) -> usize {
    let tail = dist.exceedances();
    // The largest point has zero exceedance, so a match always exists.
    tail.iter().position(|&t| t <= beta_level).unwrap_or(tail.len() - 1)
}

/// Generalized β-quantile `inf { l : P(L > l) <= β }`, attained on the support.
pub fn crvar(dist: &LossDistribution, beta_level: f64) -> Result<f64> {
    check_level(beta_level)?;
    Ok(dist.entries[crvar_index(dist, beta_level)].0)
}

/// Expected loss conditional on `L >= CRVaR`.
pub fn cres(dist: &LossDistribution, beta_level: f64) -> Result<f64> {
    check_level(beta_level)?;
    let upper = &dist.entries[crvar_index(dist, beta_level)..];
    let mass: f64 = upper.iter().map(|(_, p)| p).sum();
    if mass <= 0.0 {
        // Zero-probability tail points: the conditional law degenerates to the quantile.
        return Ok(upper[0].0);
    }
    let weighted: f64 = upper.iter().map(|(l, p)| l * p).sum();
    Ok((weighted / mass).max(upper[0].0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskReport {
    pub beta_level: f64,
    pub crvar: f64,
    pub cres: f64,
}

pub fn risk_report(dist: &LossDistribution, beta_level: f64) -> Result<RiskReport> {
    Ok(RiskReport {
        beta_level,
        crvar: crvar(dist, beta_level)?,
        cres: cres(dist, beta_level)?,
    })
}
