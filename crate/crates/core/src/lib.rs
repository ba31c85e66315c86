//! Two-sector Markovian infectious-default model.
//!
//! Defaults in two industrial sectors evolve as a pair of chain-binomial
//! processes whose one-period default probability switches between four
//! regimes according to whether each sector saw defaults in the previous
//! period. The crate provides:
//!
//! - [`model`]: regime classification and one-step transition kernels for
//!   the binomial model and its Beta-binomial generalization.
//! - [`crisis_dist`]: exact joint law of the default cycle length and
//!   severity, with a brute-force enumeration oracle.
//! - [`estimate`]: likelihoods, closed-form and numerical maximum likelihood,
//!   the nested baseline model, BIC, correlations and sector pairing.
//! - [`risk`]: crisis loss functionals, CRVaR and CRES.
//! - [`simulate`]: seeded Monte Carlo paths and synthetic panels.

pub mod crisis_dist;
pub mod error;
pub mod estimate;
pub mod model;
pub mod optim;
pub mod risk;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{BaselineParams, BetaRegimeParams, DefaultKernel, RegimeIndex, RegimeParams, Sector, SectorState};
