//! The market state machine: minting, burning and automatic buybacks.

use crate::distribution::{compute_distribution, DistributionPlan};
use crate::error::MarketError;
use crate::journal::{windowed_score, EventKind, JournalEvent};
use crate::money::Money;
use crate::params::MarketParams;
use crate::score::{aggregated_score, Score};

pub use crate::book::{CoinLot, Identity, StakeholderBook};

/// Live state of one service's rating market.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketState {
    /// Outstanding coins per rating; index 0 is rating 1.
    pub counts: Vec<u64>,
    pub book: StakeholderBook,
    /// Escrow backing every outstanding coin at the sell-back price.
    pub reserve: Money,
    pub owner_balance: Money,
    /// Every payout ever credited to stakeholders.
    pub stakeholder_credits: Money,
    /// Sequence number of the last event, 0 before any.
    pub seq: u64,
}

impl MarketState {
    pub fn new(n: u8) -> Self {
        MarketState {
            counts: vec![0; n as usize],
            book: StakeholderBook::new(n),
            reserve: Money::ZERO,
            owner_balance: Money::ZERO,
            stakeholder_credits: Money::ZERO,
            seq: 0,
        }
    }

    pub fn count(&self, rating: u8) -> u64 {
        self.counts[rating as usize - 1]
    }

    pub fn total_coins(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn score(&self, score_decimals: u32) -> Option<Score> {
        aggregated_score(&self.counts, score_decimals)
    }

    /// Plans a mint of `rating` against the current (pre-mint) state.
    pub fn compute_distribution(
        &self,
        rating: u8,
        params: &MarketParams,
    ) -> Result<DistributionPlan, MarketError> {
        let sigma = self.score(params.score_decimals);
        compute_distribution(&self.counts, sigma.as_ref(), rating, params)
    }
}

/// A mint and the buybacks it triggered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintOutcome {
    pub mint: JournalEvent,
    pub buybacks: Vec<JournalEvent>,
}

impl MintOutcome {
    pub fn events(&self) -> impl Iterator<Item = &JournalEvent> {
        std::iter::once(&self.mint).chain(self.buybacks.iter())
    }
}

/// A market with its parameters and full event journal.
///
/// All mutation goes through `&mut self`; share snapshots by cloning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Market {
    params: MarketParams,
    state: MarketState,
    journal: Vec<JournalEvent>,
}

impl Market {
    pub fn new(params: MarketParams) -> Result<Self, MarketError> {
        params.validate()?;
        let state = MarketState::new(params.n);
        Ok(Market {
            params,
            state,
            journal: Vec::new(),
        })
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    pub fn state(&self) -> &MarketState {
        &self.state
    }

    pub fn journal(&self) -> &[JournalEvent] {
        &self.journal
    }

    pub fn into_parts(self) -> (MarketParams, MarketState, Vec<JournalEvent>) {
        (self.params, self.state, self.journal)
    }

    /// All-time aggregated score.
    pub fn score(&self) -> Option<Score> {
        self.state.score(self.params.score_decimals)
    }

    /// Score over the configured window, or all-time when none is set.
    pub fn published_score(&self) -> Option<Score> {
        match self.params.window {
            Some(w) => self.windowed_score(w),
            None => self.score(),
        }
    }

    pub fn windowed_score(&self, window: usize) -> Option<Score> {
        windowed_score(&self.journal, window, self.params.score_decimals)
    }

    /// Mints one coin of `rating` for `identity`.
    ///
    /// The spread is split over pre-mint holdings at the pre-mint score; the
    /// new coin joins the book afterwards and earns only from later mints.
    pub fn buy_coin(
        &mut self,
        identity: &Identity,
        rating: u8,
    ) -> Result<MintOutcome, MarketError> {
        self.params.check_rating(rating)?;
        if let Some(limit) = self.params.max_coins_per_identity {
            let held = self.state.book.coins_held_by(identity);
            if held >= limit {
                return Err(MarketError::IdentityLimitExceeded {
                    identity: identity.clone(),
                    held,
                    limit,
                });
            }
        }

        let plan = self.state.compute_distribution(rating, &self.params)?;
        let state = &mut self.state;
        for (&w, &per_coin) in &plan.per_coin_payout {
            state.book.credit_rating(w, per_coin);
            state.stakeholder_credits += per_coin * state.counts[w as usize - 1];
        }
        state.owner_balance += plan.owner_remainder;
        state.reserve += self.params.beta;

        state.seq += 1;
        state.counts[rating as usize - 1] += 1;
        state.book.add_lot(identity.clone(), rating, state.seq);

        let mint = JournalEvent {
            seq: state.seq,
            kind: EventKind::Mint,
            identity: identity.clone(),
            rating,
            cash_in: self.params.alpha,
            cash_out: Money::ZERO,
            plan: Some(plan),
            score_after: state.score(self.params.score_decimals),
        };
        self.journal.push(mint.clone());
        let buybacks = self.apply_profit_cap();
        Ok(MintOutcome { mint, buybacks })
    }

    /// Sells `identity`'s oldest coin of `rating` back at the fixed price.
    pub fn sell_coin(
        &mut self,
        identity: &Identity,
        rating: u8,
    ) -> Result<JournalEvent, MarketError> {
        self.params.check_rating(rating)?;
        let minted_at = self
            .state
            .book
            .oldest_lot_of(identity, rating)
            .map(|lot| lot.minted_at)
            .ok_or_else(|| MarketError::NoSuchHolding {
                identity: identity.clone(),
                rating,
            })?;
        Ok(self.burn(minted_at, EventKind::Burn))
    }

    /// Buys back, coin by coin and oldest first, every lot whose accrued
    /// profit per coin has reached the cap. No-op without a cap.
    pub fn apply_profit_cap(&mut self) -> Vec<JournalEvent> {
        let Some(cap) = self.params.profit_cap else {
            return Vec::new();
        };
        let mut due: Vec<u64> = self
            .params
            .ratings()
            .flat_map(|r| self.state.book.lots_at_cap(r, cap))
            .collect();
        due.sort_unstable();

        let mut events = Vec::new();
        for minted_at in due {
            while self.state.book.lot(minted_at).is_some() {
                events.push(self.burn(minted_at, EventKind::Buyback));
            }
        }
        events
    }

    fn burn(&mut self, minted_at: u64, kind: EventKind) -> JournalEvent {
        let state = &mut self.state;
        let lot = state.book.remove_coin(minted_at);
        state.counts[lot.rating as usize - 1] -= 1;
        state.reserve -= self.params.beta;
        state.seq += 1;
        let event = JournalEvent {
            seq: state.seq,
            kind,
            identity: lot.identity,
            rating: lot.rating,
            cash_in: Money::ZERO,
            cash_out: self.params.beta,
            plan: None,
            score_after: state.score(self.params.score_decimals),
        };
        self.journal.push(event.clone());
        event
    }

    /// Rebuilds a market by re-executing `events` and checking that every
    /// re-executed event matches the recorded one.
    pub fn replay(params: MarketParams, events: &[JournalEvent]) -> Result<Self, MarketError> {
        let mut market = Market::new(params)?;
        let corrupt = |idx: usize, reason: String| MarketError::CorruptJournal {
            line: idx + 1,
            reason,
        };
        let mut idx = 0;
        while idx < events.len() {
            let recorded = &events[idx];
            match recorded.kind {
                EventKind::Mint => {
                    let outcome = market
                        .buy_coin(&recorded.identity, recorded.rating)
                        .map_err(|e| corrupt(idx, e.to_string()))?;
                    if &outcome.mint != recorded {
                        return Err(corrupt(
                            idx,
                            format!("mint seq {} does not replay", recorded.seq),
                        ));
                    }
                    for buyback in &outcome.buybacks {
                        idx += 1;
                        match events.get(idx) {
                            Some(ev) if ev == buyback => {}
                            _ => {
                                return Err(corrupt(
                                    idx,
                                    format!("expected buyback seq {}", buyback.seq),
                                ))
                            }
                        }
                    }
                }
                EventKind::Burn => {
                    let burned = market
                        .sell_coin(&recorded.identity, recorded.rating)
                        .map_err(|e| corrupt(idx, e.to_string()))?;
                    if &burned != recorded {
                        return Err(corrupt(
                            idx,
                            format!("burn seq {} does not replay", recorded.seq),
                        ));
                    }
                }
                EventKind::Buyback => {
                    return Err(corrupt(
                        idx,
                        format!("buyback seq {} without a triggering mint", recorded.seq),
                    ));
                }
            }
            idx += 1;
        }
        Ok(market)
    }
}
