//! Who holds which coins, and what each coin has earned.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::money::Money;

/// Opaque stakeholder id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Identity(String);

impl Identity {
    pub fn new(id: impl Into<String>) -> Self {
        Identity(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Identity {
    fn from(s: &str) -> Self {
        Identity::new(s)
    }
}

impl From<String> for Identity {
    fn from(s: String) -> Self {
        Identity(s)
    }
}

/// Coins of one rating minted together for one identity.
///
/// Profit is tracked through a per-rating cumulative payout index: a lot's
/// accrued profit per coin is the index now minus the index when it was
/// minted, so crediting a mint costs O(levels) rather than O(lots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinLot {
    pub identity: Identity,
    pub rating: u8,
    pub count: u64,
    /// Sequence number of the mint that created the lot.
    pub minted_at: u64,
    entry_index: Money,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StakeholderBook {
    lots: BTreeMap<u64, CoinLot>,
    by_rating: Vec<BTreeSet<u64>>,
    by_identity_rating: BTreeMap<(Identity, u8), BTreeSet<u64>>,
    held: BTreeMap<(Identity, u8), u64>,
    held_by_identity: BTreeMap<Identity, u64>,
    /// Cumulative per-coin payout ever credited to each rating.
    profit_index: Vec<Money>,
    /// Profit already earned by coins that have left the book.
    realized: BTreeMap<Identity, Money>,
}

impl StakeholderBook {
    pub fn new(n: u8) -> Self {
        StakeholderBook {
            by_rating: vec![BTreeSet::new(); n as usize],
            profit_index: vec![Money::ZERO; n as usize],
            ..Default::default()
        }
    }

    pub fn lots(&self) -> impl Iterator<Item = &CoinLot> {
        self.lots.values()
    }

    pub fn lot(&self, minted_at: u64) -> Option<&CoinLot> {
        self.lots.get(&minted_at)
    }

    pub fn accrued_profit_per_coin(&self, lot: &CoinLot) -> Money {
        self.profit_index[lot.rating as usize - 1] - lot.entry_index
    }

    /// `x_{i,j}`: coins of `rating` held by `identity`.
    pub fn holding(&self, identity: &Identity, rating: u8) -> u64 {
        self.held
            .get(&(identity.clone(), rating))
            .copied()
            .unwrap_or(0)
    }

    pub fn coins_held_by(&self, identity: &Identity) -> u64 {
        self.held_by_identity.get(identity).copied().unwrap_or(0)
    }

    pub fn count_for_rating(&self, rating: u8) -> u64 {
        self.by_rating[rating as usize - 1]
            .iter()
            .map(|id| self.lots[id].count)
            .sum()
    }

    /// Total profit credited to `identity`, open lots and closed ones.
    pub fn credits_of(&self, identity: &Identity) -> Money {
        let open: Money = self
            .by_identity_rating
            .range((identity.clone(), 0)..=(identity.clone(), u8::MAX))
            .flat_map(|(_, ids)| ids.iter())
            .map(|id| {
                let lot = &self.lots[id];
                self.accrued_profit_per_coin(lot) * lot.count
            })
            .sum();
        open + self.realized.get(identity).copied().unwrap_or(Money::ZERO)
    }

    /// Every identity that ever held a coin, with its total credits.
    pub fn all_credits(&self) -> BTreeMap<Identity, Money> {
        let mut out = self.realized.clone();
        for lot in self.lots.values() {
            *out.entry(lot.identity.clone()).or_default() +=
                self.accrued_profit_per_coin(lot) * lot.count;
        }
        out
    }

    pub(crate) fn credit_rating(&mut self, rating: u8, per_coin: Money) {
        self.profit_index[rating as usize - 1] += per_coin;
    }

    pub(crate) fn add_lot(&mut self, identity: Identity, rating: u8, minted_at: u64) {
        let lot = CoinLot {
            identity: identity.clone(),
            rating,
            count: 1,
            minted_at,
            entry_index: self.profit_index[rating as usize - 1],
        };
        self.lots.insert(minted_at, lot);
        self.by_rating[rating as usize - 1].insert(minted_at);
        self.by_identity_rating
            .entry((identity.clone(), rating))
            .or_default()
            .insert(minted_at);
        *self.held.entry((identity.clone(), rating)).or_default() += 1;
        *self.held_by_identity.entry(identity).or_default() += 1;
    }

    /// Oldest lot of `rating` held by `identity`.
    pub fn oldest_lot_of(&self, identity: &Identity, rating: u8) -> Option<&CoinLot> {
        self.by_identity_rating
            .get(&(identity.clone(), rating))
            .and_then(|ids| ids.first())
            .map(|id| &self.lots[id])
    }

    /// Lots of `rating` whose accrued profit per coin is at least `cap`.
    ///
    /// Earlier lots entered at a lower index, so they are always the ones
    /// over the cap; the scan stops at the first lot below it.
    pub fn lots_at_cap(&self, rating: u8, cap: Money) -> Vec<u64> {
        self.by_rating[rating as usize - 1]
            .iter()
            .take_while(|id| self.accrued_profit_per_coin(&self.lots[id]) >= cap)
            .copied()
            .collect()
    }

    /// Removes one coin from the lot minted at `minted_at`, realizing its
    /// accrued profit for the holder.
    pub(crate) fn remove_coin(&mut self, minted_at: u64) -> CoinLot {
        let lot = self.lots.get_mut(&minted_at).expect("lot exists");
        lot.count -= 1;
        let snapshot = lot.clone();
        let accrued = self.profit_index[snapshot.rating as usize - 1] - snapshot.entry_index;
        *self.realized.entry(snapshot.identity.clone()).or_default() += accrued;

        let key = (snapshot.identity.clone(), snapshot.rating);
        decrement(&mut self.held, key.clone());
        decrement(&mut self.held_by_identity, snapshot.identity.clone());
        if snapshot.count == 0 {
            self.lots.remove(&minted_at);
            self.by_rating[snapshot.rating as usize - 1].remove(&minted_at);
            if let Some(ids) = self.by_identity_rating.get_mut(&key) {
                ids.remove(&minted_at);
                if ids.is_empty() {
                    self.by_identity_rating.remove(&key);
                }
            }
        }
        snapshot
    }
}

fn decrement<K: Ord>(map: &mut BTreeMap<K, u64>, key: K) {
    if let Some(v) = map.get_mut(&key) {
        *v -= 1;
        if *v == 0 {
            map.remove(&key);
        }
    }
}
