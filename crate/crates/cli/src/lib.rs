//! Persistence and reporting helpers behind the `reward-rating` binary.

pub mod store;

use std::collections::BTreeMap;

use reward_rating::{Market, Money};
use serde_json::{json, Value};

pub use store::{load_params, rebuild_state, write_atomic, MarketDir};

/// Observable market state as printed by `state`.
pub fn state_summary(market: &Market) -> Value {
    let state = market.state();
    let mut holdings: BTreeMap<String, BTreeMap<u8, u64>> = BTreeMap::new();
    for lot in state.book.lots() {
        *holdings
            .entry(lot.identity.to_string())
            .or_default()
            .entry(lot.rating)
            .or_default() += lot.count;
    }
    let credits: BTreeMap<String, Money> = state
        .book
        .all_credits()
        .into_iter()
        .map(|(id, m)| (id.to_string(), m))
        .collect();
    json!({
        "seq": state.seq,
        "counts": state.counts,
        "score": market.score().map(|s| s.to_string()),
        "reserve": state.reserve,
        "owner_balance": state.owner_balance,
        "stakeholder_credits": state.stakeholder_credits,
        "holdings": holdings,
        "credits": credits,
    })
}
