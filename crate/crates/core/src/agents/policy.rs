use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::book::Identity;
use crate::distribution::compute_distribution;
use crate::journal::EventKind;
use crate::market::Market;
use crate::money::Money;
use crate::score::aggregated_score;

use super::scenario::{AgentSpec, Policy, ScoreView};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Buy { identity: Identity, rating: u8 },
    Sell { identity: Identity, rating: u8 },
}

/// Buys a rating drawn from the agent's quality belief with probability
/// `participation_prob`; never sells.
pub fn honest_step<R: Rng + ?Sized>(
    agent: &AgentSpec,
    budget: Money,
    market: &Market,
    rng: &mut R,
) -> Option<Action> {
    let Policy::Honest {
        quality_belief,
        participation_prob,
    } = &agent.policy
    else {
        return None;
    };
    if budget < market.params().alpha {
        return None;
    }
    // always consume the same number of draws so one agent's budget does not
    // shift everyone else's randomness
    let participates = rng.gen::<f64>() < *participation_prob;
    let dist = WeightedIndex::new(quality_belief).ok()?;
    let rating = dist.sample(rng) as u8 + 1;
    participates.then(|| Action::Buy {
        identity: agent.identity(0),
        rating,
    })
}

/// Buys the extreme coin in the attack direction, through the next sybil
/// identity, until the score reaches the target.
pub fn attacker_step(
    agent: &AgentSpec,
    budget: Money,
    actions_taken: u64,
    market: &Market,
) -> Option<Action> {
    let Policy::Attacker {
        target_score,
        direction_coin,
        score_view,
        ..
    } = &agent.policy
    else {
        return None;
    };
    if budget < market.params().alpha {
        return None;
    }
    let pushing_up = *direction_coin == market.params().n;
    let short_of_target = match market.score() {
        None => true,
        Some(score) => {
            let current = match score_view {
                ScoreView::Published => score.published().to_ratio(),
                ScoreView::Exact => *score.value(),
            };
            let target = target_score.to_ratio();
            if pushing_up {
                current < target
            } else {
                current > target
            }
        }
    };
    short_of_target.then(|| Action::Buy {
        identity: agent.identity(actions_taken),
        rating: *direction_coin,
    })
}

/// Ratings of the last `window` mints, oldest first.
pub fn recent_mint_ratings(market: &Market, window: usize) -> Vec<u8> {
    let mut ratings: Vec<u8> = market
        .journal()
        .iter()
        .rev()
        .filter(|e| e.kind == EventKind::Mint)
        .take(window)
        .map(|e| e.rating)
        .collect();
    ratings.reverse();
    ratings
}

/// Expected net profit (minor units, exact) of buying one coin of each
/// rating, index 0 being rating 1.
///
/// The next-mint belief is the empirical distribution of `recent_mints`
/// with add-one smoothing. Holdings stay at current counts plus the
/// candidate coin for all `horizon` future mints; the round-trip spread
/// `gamma` is subtracted once.
pub fn strategic_expectations(
    market: &Market,
    recent_mints: &[u8],
    horizon: u32,
) -> Vec<Ratio<i128>> {
    let params = market.params();
    let n = params.n as usize;

    let mut freq = vec![1i128; n];
    for &r in recent_mints {
        freq[r as usize - 1] += 1;
    }
    let total: i128 = freq.iter().sum();

    let counts = &market.state().counts;
    params
        .ratings()
        .map(|candidate| {
            let mut after = counts.clone();
            after[candidate as usize - 1] += 1;
            let sigma = aggregated_score(&after, params.score_decimals);
            let per_mint: Ratio<i128> = params
                .ratings()
                .map(|next| {
                    let plan = compute_distribution(&after, sigma.as_ref(), next, params)
                        .expect("ratings come from params");
                    let payout = plan
                        .per_coin_payout
                        .get(&candidate)
                        .copied()
                        .unwrap_or(Money::ZERO);
                    Ratio::new(freq[next as usize - 1] * payout.get() as i128, total)
                })
                .sum();
            per_mint * horizon as i128 - params.gamma.get() as i128
        })
        .collect()
}

/// Index of the best expectation: highest value, then nearest `sigma`,
/// then lowest rating.
pub fn best_rating(expectations: &[Ratio<i128>], sigma: Option<&Ratio<i128>>) -> u8 {
    let distance = |rating: u8| match sigma {
        Some(s) => (Ratio::from_integer(rating as i128) - s).abs(),
        None => Ratio::zero(),
    };
    let (idx, _) = expectations
        .iter()
        .enumerate()
        .min_by(|(i, a), (k, b)| {
            b.cmp(a)
                .then_with(|| distance(*i as u8 + 1).cmp(&distance(*k as u8 + 1)))
        })
        .expect("n >= 2");
    idx as u8 + 1
}

/// Myopic best response: buys the rating with the highest expected net
/// profit if it beats `min_profit_threshold`. Ties go to the rating nearest
/// the current exact score, then to the lower rating.
pub fn strategic_step(agent: &AgentSpec, budget: Money, market: &Market) -> Option<Action> {
    let Policy::Strategic {
        belief_window,
        horizon,
        min_profit_threshold,
    } = &agent.policy
    else {
        return None;
    };
    if budget < market.params().alpha {
        return None;
    }
    let history = recent_mint_ratings(market, *belief_window);
    let expectations = strategic_expectations(market, &history, *horizon);
    let sigma = market.score().map(|s| *s.value());
    let rating = best_rating(&expectations, sigma.as_ref());
    let best = &expectations[rating as usize - 1];
    (*best > Ratio::from_integer(*min_profit_threshold as i128)).then(|| Action::Buy {
        identity: agent.identity(0),
        rating,
    })
}
