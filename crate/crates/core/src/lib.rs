//! A rating market in the style of a stock exchange.
//!
//! Reviewers buy coins of a rating level at a fixed price and may sell them
//! back at a lower fixed price. The published score is the coin-weighted mean
//! rating, and the spread of every mint is shared among holders on the side
//! of the score the new coin pushes toward, weighted by rating distance.
//!
//! - [`market`]: the state machine (mint, burn, profit-cap buybacks, replay)
//! - [`distribution`]: winner sets and the per-mint split
//! - [`ledger`]: independent journal audit
//! - [`agents`]: honest, attacker and strategic policies plus a seeded driver
//! - [`experiments`]: the worked-example replay and attacker cost curves

pub mod agents;
pub mod book;
pub mod decimal;
pub mod distribution;
pub mod error;
pub mod experiments;
pub mod journal;
pub mod ledger;
pub mod market;
pub mod money;
pub mod params;
pub mod score;
pub mod weight;

pub use book::{CoinLot, Identity, StakeholderBook};
pub use decimal::Decimal;
pub use distribution::{compute_distribution, winner_set, DistributionPlan};
pub use error::MarketError;
pub use journal::{read_journal, windowed_score, write_journal, EventKind, JournalEvent};
pub use ledger::{verify_ledger, BalanceReport, Violation, ViolationKind};
pub use market::{Market, MarketState, MintOutcome};
pub use money::Money;
pub use params::{MarketParams, WeightFn};
pub use score::{aggregated_score, Score};
pub use weight::weight;
