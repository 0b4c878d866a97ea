use serde::{Deserialize, Serialize};

use crate::book::Identity;
use crate::decimal::Decimal;
use crate::error::MarketError;
use crate::money::Money;
use crate::params::MarketParams;

/// Which form of the score an attacker compares against its target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreView {
    /// The rounded score everyone sees.
    #[default]
    Published,
    /// The unrounded weighted mean.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Policy {
    Honest {
        /// Relative weights over ratings `1..=n`.
        quality_belief: Vec<u32>,
        participation_prob: f64,
    },
    Attacker {
        target_score: Decimal,
        /// `n` to push the score up, `1` to push it down.
        direction_coin: u8,
        identity_pool_size: u32,
        #[serde(default)]
        score_view: ScoreView,
    },
    Strategic {
        belief_window: usize,
        horizon: u32,
        /// Minimum expected net profit (minor units) required to act.
        min_profit_threshold: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub name: String,
    pub budget: Money,
    /// Relative arrival weight under [`Arrival::WeightedRandom`].
    #[serde(default = "default_weight")]
    pub weight: u32,
    #[serde(flatten)]
    pub policy: Policy,
}

fn default_weight() -> u32 {
    1
}

impl AgentSpec {
    pub fn honest(
        name: &str,
        budget: Money,
        quality_belief: Vec<u32>,
        participation_prob: f64,
    ) -> Self {
        AgentSpec {
            name: name.to_string(),
            budget,
            weight: 1,
            policy: Policy::Honest {
                quality_belief,
                participation_prob,
            },
        }
    }

    pub fn attacker(
        name: &str,
        budget: Money,
        target_score: Decimal,
        direction_coin: u8,
        identity_pool_size: u32,
    ) -> Self {
        AgentSpec {
            name: name.to_string(),
            budget,
            weight: 1,
            policy: Policy::Attacker {
                target_score,
                direction_coin,
                identity_pool_size,
                score_view: ScoreView::Published,
            },
        }
    }

    pub fn strategic(
        name: &str,
        budget: Money,
        belief_window: usize,
        horizon: u32,
        min_profit_threshold: i64,
    ) -> Self {
        AgentSpec {
            name: name.to_string(),
            budget,
            weight: 1,
            policy: Policy::Strategic {
                belief_window,
                horizon,
                min_profit_threshold,
            },
        }
    }

    pub fn with_score_view(mut self, view: ScoreView) -> Self {
        if let Policy::Attacker { score_view, .. } = &mut self.policy {
            *score_view = view;
        }
        self
    }

    /// Identity used for the `k`-th action of this agent.
    pub fn identity(&self, k: u64) -> Identity {
        match &self.policy {
            Policy::Attacker {
                identity_pool_size, ..
            } => Identity::new(format!(
                "{}#{}",
                self.name,
                k % (*identity_pool_size).max(1) as u64
            )),
            _ => Identity::new(self.name.clone()),
        }
    }

    /// Whether `identity` is one this agent acts through.
    pub fn owns(&self, identity: &Identity) -> bool {
        match &self.policy {
            Policy::Attacker { .. } => identity
                .as_str()
                .strip_prefix(self.name.as_str())
                .and_then(|rest| rest.strip_prefix('#'))
                .is_some_and(|k| k.parse::<u64>().is_ok()),
            _ => identity.as_str() == self.name,
        }
    }

    pub fn validate(&self, params: &MarketParams) -> Result<(), MarketError> {
        let bad = |msg: String| {
            Err(MarketError::InvalidParams(format!(
                "agent {}: {msg}",
                self.name
            )))
        };
        if self.budget < Money::ZERO {
            return bad("budget must be non-negative".into());
        }
        match &self.policy {
            Policy::Honest {
                quality_belief,
                participation_prob,
            } => {
                if quality_belief.len() != params.n as usize {
                    return bad(format!("quality_belief needs {} weights", params.n));
                }
                if quality_belief.iter().all(|&w| w == 0) {
                    return bad("quality_belief has no mass".into());
                }
                if !(0.0..=1.0).contains(participation_prob) {
                    return bad("participation_prob must be in [0, 1]".into());
                }
            }
            Policy::Attacker {
                target_score,
                direction_coin,
                identity_pool_size,
                ..
            } => {
                let lo = Decimal::from_int(1);
                let hi = Decimal::from_int(params.n as i64);
                if *target_score < lo || *target_score > hi {
                    return bad(format!(
                        "target_score {target_score} outside [1, {}]",
                        params.n
                    ));
                }
                if *direction_coin != 1 && *direction_coin != params.n {
                    return bad(format!("direction_coin must be 1 or {}", params.n));
                }
                if *identity_pool_size == 0 {
                    return bad("identity_pool_size must be at least 1".into());
                }
            }
            Policy::Strategic { belief_window, .. } => {
                if *belief_window == 0 {
                    return bad("belief_window must be at least 1".into());
                }
            }
        }
        Ok(())
    }
}

/// Agent polling order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrival {
    /// Every agent acts once per step, in listed order.
    #[default]
    RoundRobin,
    /// One agent per step, drawn by weight.
    WeightedRandom,
}

/// Coins bought before the first step, e.g. an existing honest base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preseed {
    pub identity: Identity,
    pub rating: u8,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub params: MarketParams,
    pub agents: Vec<AgentSpec>,
    pub steps: u64,
    pub seed: u64,
    #[serde(default)]
    pub arrival: Arrival,
    #[serde(default)]
    pub preseed: Vec<Preseed>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), MarketError> {
        self.params.validate()?;
        if self.agents.is_empty() {
            return Err(MarketError::InvalidParams(
                "scenario needs at least one agent".into(),
            ));
        }
        for agent in &self.agents {
            agent.validate(&self.params)?;
        }
        if self.arrival == Arrival::WeightedRandom && self.agents.iter().all(|a| a.weight == 0) {
            return Err(MarketError::InvalidParams(
                "all arrival weights are zero".into(),
            ));
        }
        for seed in &self.preseed {
            self.params.check_rating(seed.rating)?;
        }
        Ok(())
    }
}
