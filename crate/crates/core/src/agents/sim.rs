use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::book::Identity;
use crate::decimal::Decimal;
use crate::error::MarketError;
use crate::journal::{EventKind, JournalEvent};
use crate::market::Market;
use crate::money::Money;

use super::policy::{attacker_step, honest_step, strategic_step, Action};
use super::scenario::{Arrival, Policy, ScenarioConfig};

/// Cash accounting for one participant across all its identities.
///
/// `received` counts sell-back cash plus every payout credited to the
/// participant's coins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgentAccount {
    pub spent: Money,
    pub cash_back: Money,
    pub credits: Money,
    pub coins_bought: u64,
}

impl AgentAccount {
    pub fn received(&self) -> Money {
        self.cash_back + self.credits
    }

    pub fn net(&self) -> Money {
        self.received() - self.spent
    }
}

/// A market operation an agent attempted that the market refused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub step: u64,
    pub agent: String,
    pub error: MarketError,
}

#[derive(Debug, Clone)]
pub struct Trace {
    /// Final market, including the full journal.
    pub market: Market,
    /// Keyed by agent name; preseed identities appear under their own id.
    pub accounts: BTreeMap<String, AgentAccount>,
    /// Published score after each step; entry 0 is after preseeding.
    pub scores: Vec<Option<Decimal>>,
    pub rejections: Vec<Rejection>,
}

impl Trace {
    pub fn journal(&self) -> &[JournalEvent] {
        self.market.journal()
    }

    /// Sum of all participants' nets; equals minus (owner balance + reserve).
    pub fn total_net(&self) -> Money {
        self.accounts.values().map(AgentAccount::net).sum()
    }
}

struct Runtime {
    budget: Money,
    actions: u64,
}

/// Runs `scenario` to completion. Identical scenarios (including the seed)
/// give identical traces.
pub fn run_simulation(scenario: &ScenarioConfig) -> Result<Trace, MarketError> {
    scenario.validate()?;
    let mut market = Market::new(scenario.params.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    for seed in &scenario.preseed {
        for _ in 0..seed.count {
            market.buy_coin(&seed.identity, seed.rating)?;
        }
    }

    let mut runtime: Vec<Runtime> = scenario
        .agents
        .iter()
        .map(|a| Runtime {
            budget: a.budget,
            actions: 0,
        })
        .collect();
    let arrival_weights = match scenario.arrival {
        Arrival::RoundRobin => None,
        Arrival::WeightedRandom => Some(
            WeightedIndex::new(scenario.agents.iter().map(|a| a.weight))
                .map_err(|e| MarketError::InvalidParams(e.to_string()))?,
        ),
    };

    let mut scores = vec![market.published_score().map(|s| s.published())];
    let mut rejections = Vec::new();
    let mut order = Vec::with_capacity(scenario.agents.len());
    for step in 0..scenario.steps {
        order.clear();
        match &arrival_weights {
            None => order.extend(0..scenario.agents.len()),
            Some(dist) => order.push(dist.sample(&mut rng)),
        }
        for &idx in &order {
            let agent = &scenario.agents[idx];
            let rt = &mut runtime[idx];
            let action = match &agent.policy {
                Policy::Honest { .. } => honest_step(agent, rt.budget, &market, &mut rng),
                Policy::Attacker { .. } => attacker_step(agent, rt.budget, rt.actions, &market),
                Policy::Strategic { .. } => strategic_step(agent, rt.budget, &market),
            };
            let Some(action) = action else { continue };
            let result = match &action {
                Action::Buy { identity, rating } => market.buy_coin(identity, *rating).map(|_| {
                    rt.budget -= market.params().alpha;
                }),
                Action::Sell { identity, rating } => {
                    market.sell_coin(identity, *rating).map(|_| {
                        rt.budget += market.params().beta;
                    })
                }
            };
            match result {
                Ok(()) => rt.actions += 1,
                Err(error) => rejections.push(Rejection {
                    step,
                    agent: agent.name.clone(),
                    error,
                }),
            }
        }
        scores.push(market.published_score().map(|s| s.published()));
    }

    let accounts = settle_accounts(scenario, &market);
    Ok(Trace {
        market,
        accounts,
        scores,
        rejections,
    })
}

fn settle_accounts(scenario: &ScenarioConfig, market: &Market) -> BTreeMap<String, AgentAccount> {
    let account_of = |identity: &Identity| -> String {
        scenario
            .agents
            .iter()
            .find(|a| a.owns(identity))
            .map(|a| a.name.clone())
            .unwrap_or_else(|| identity.to_string())
    };

    let mut accounts: BTreeMap<String, AgentAccount> = scenario
        .agents
        .iter()
        .map(|a| (a.name.clone(), AgentAccount::default()))
        .collect();
    for event in market.journal() {
        let acct = accounts.entry(account_of(&event.identity)).or_default();
        acct.spent += event.cash_in;
        acct.cash_back += event.cash_out;
        if event.kind == EventKind::Mint {
            acct.coins_bought += 1;
        }
    }
    for (identity, credits) in market.state().book.all_credits() {
        accounts.entry(account_of(&identity)).or_default().credits += credits;
    }
    accounts
}
