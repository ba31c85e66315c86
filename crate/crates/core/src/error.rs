use thiserror::Error;

use crate::model::{RegimeIndex, Sector};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state space too large: {0}")]
    StateSpaceTooLarge(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sector {sector} regime {regime} never observed; its parameters are not identified")]
    UnderIdentified { sector: Sector, regime: RegimeIndex },

    #[error("invalid panel at row {row}: {reason}")]
    InvalidPanel { row: usize, reason: String },

    #[error("correlation undefined for series {0} and {1}: constant series")]
    UndefinedCorrelation(usize, usize),
}
