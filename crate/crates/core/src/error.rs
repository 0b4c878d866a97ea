use thiserror::Error;

use crate::book::Identity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("rating {rating} is outside 1..={n}")]
    InvalidRating { rating: u8, n: u8 },
    #[error("identity {identity} already holds {held} coin(s), limit is {limit}")]
    IdentityLimitExceeded {
        identity: Identity,
        held: u64,
        limit: u64,
    },
    #[error("identity {identity} holds no coin of rating {rating}")]
    NoSuchHolding { identity: Identity, rating: u8 },
    #[error("target score {target} is unreachable with {n} rating levels")]
    TargetUnreachable { target: String, n: u8 },
    #[error("corrupt journal at line {line}: {reason}")]
    CorruptJournal { line: usize, reason: String },
}

impl MarketError {
    /// Stable variant name, used by the command line surface.
    pub fn name(&self) -> &'static str {
        match self {
            MarketError::InvalidParams(_) => "InvalidParams",
            MarketError::InvalidRating { .. } => "InvalidRating",
            MarketError::IdentityLimitExceeded { .. } => "IdentityLimitExceeded",
            MarketError::NoSuchHolding { .. } => "NoSuchHolding",
            MarketError::TargetUnreachable { .. } => "TargetUnreachable",
            MarketError::CorruptJournal { .. } => "CorruptJournal",
        }
    }
}
