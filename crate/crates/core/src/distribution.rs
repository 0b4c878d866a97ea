//! Winner sets and the per-mint profit split.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::MarketError;
use crate::money::Money;
use crate::params::MarketParams;
use crate::score::Score;
use crate::weight::weight;

/// Rating levels whose holders share the profit of minting rating `j`.
///
/// The band strictly above the score for up-mints, strictly below for
/// down-mints, every level when `j` equals the published score.
pub fn winner_set(sigma: &Score, j: u8, n: u8) -> Vec<u8> {
    match sigma.cmp_rating(j) {
        Ordering::Greater => (1..=n)
            .filter(|&i| sigma.cmp_rating(i) == Ordering::Greater)
            .collect(),
        Ordering::Less => (1..=n)
            .filter(|&i| sigma.cmp_rating(i) == Ordering::Less)
            .collect(),
        Ordering::Equal => (1..=n).collect(),
    }
}

/// How one mint's spread is paid out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionPlan {
    #[serde(skip)]
    pub mint_rating: u8,
    /// Ascending; may include levels with no outstanding coins.
    pub winners: Vec<u8>,
    /// Per-coin payout for every winner level that has outstanding coins.
    pub per_coin_payout: BTreeMap<u8, Money>,
    pub owner_remainder: Money,
}

impl DistributionPlan {
    /// All of the spread to the owner; used for the first coin and for mints
    /// whose winner levels are all empty.
    fn owner_takes_all(mint_rating: u8, winners: Vec<u8>, gamma: Money) -> Self {
        DistributionPlan {
            mint_rating,
            winners,
            per_coin_payout: BTreeMap::new(),
            owner_remainder: gamma,
        }
    }

    /// Money credited to stakeholders given the pre-mint coin counts.
    pub fn distributed(&self, counts: &[u64]) -> Money {
        self.per_coin_payout
            .iter()
            .map(|(&w, &p)| p * counts[w as usize - 1])
            .sum()
    }
}

/// Plans the split of `gamma` for a mint of rating `j` against pre-mint
/// `counts` and pre-mint score.
///
/// Per-coin payouts are `gamma * f(w, j) / D` floored to minor units, with
/// `D = sum over winner levels q of counts[q] * f(q, j)` evaluated exactly.
/// Whatever flooring leaves over goes to the owner.
pub fn compute_distribution(
    counts: &[u64],
    sigma: Option<&Score>,
    j: u8,
    params: &MarketParams,
) -> Result<DistributionPlan, MarketError> {
    params.check_rating(j)?;
    debug_assert_eq!(counts.len(), params.n as usize);
    let Some(sigma) = sigma else {
        return Ok(DistributionPlan::owner_takes_all(
            j,
            Vec::new(),
            params.gamma,
        ));
    };
    let winners = winner_set(sigma, j, params.n);

    let denominator: Ratio<i128> = winners
        .iter()
        .map(|&q| weight(params.weight_fn, q, j) * counts[q as usize - 1] as i128)
        .sum();
    if denominator.is_zero() {
        return Ok(DistributionPlan::owner_takes_all(j, winners, params.gamma));
    }

    let gamma = params.gamma.get() as i128;
    let mut per_coin_payout = BTreeMap::new();
    let mut distributed = Money::ZERO;
    for &w in winners.iter().filter(|&&w| counts[w as usize - 1] > 0) {
        let share = weight(params.weight_fn, w, j) * gamma / denominator;
        let payout = Money(share.floor().to_integer() as i64);
        distributed += payout * counts[w as usize - 1];
        per_coin_payout.insert(w, payout);
    }
    Ok(DistributionPlan {
        mint_rating: j,
        winners,
        per_coin_payout,
        owner_remainder: params.gamma - distributed,
    })
}
