//! Mechanism constants for one market.

use serde::{Deserialize, Serialize};

use crate::error::MarketError;
use crate::money::Money;

/// Which distance-decay weight the profit split uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightFn {
    /// `2^-(|w-j|+1)`
    F1,
    /// `1/(2+|w-j|)`
    F2,
}

pub const MAX_SCORE_DECIMALS: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Number of rating levels; ratings are `1..=n`.
    pub n: u8,
    /// Price paid to mint a coin.
    pub alpha: Money,
    /// Price the system pays back when a coin is sold.
    pub beta: Money,
    /// Spread distributed on every mint; always `alpha - beta`.
    pub gamma: Money,
    pub score_decimals: u32,
    pub weight_fn: WeightFn,
    /// Lifetime per-coin profit after which the coin is bought back.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profit_cap: Option<Money>,
    /// Maximum number of coins one identity may hold at once.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_coins_per_identity: Option<u64>,
    /// Default event-count window for published score queries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
}

impl MarketParams {
    /// Builds and validates a parameter set with `gamma = alpha - beta`.
    pub fn new(
        n: u8,
        alpha: Money,
        beta: Money,
        score_decimals: u32,
        weight_fn: WeightFn,
    ) -> Result<Self, MarketError> {
        let params = MarketParams {
            n,
            alpha,
            beta,
            gamma: alpha - beta,
            score_decimals,
            weight_fn,
            profit_cap: None,
            max_coins_per_identity: None,
            window: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// The restaurant setup used in the worked example: five levels,
    /// $2 to buy, $1 back, $1 shared, two-decimal score, `f1` weights.
    pub fn worked_example() -> Self {
        MarketParams::new(5, Money(200), Money(100), 2, WeightFn::F1)
            .expect("worked example parameters are valid")
    }

    pub fn with_profit_cap(mut self, cap: Money) -> Self {
        self.profit_cap = Some(cap);
        self
    }

    pub fn with_identity_limit(mut self, limit: u64) -> Self {
        self.max_coins_per_identity = Some(limit);
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = Some(window);
        self
    }

    pub fn validate(&self) -> Result<(), MarketError> {
        let bad = |msg: String| Err(MarketError::InvalidParams(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.alpha <= Money::ZERO || self.beta <= Money::ZERO || self.gamma <= Money::ZERO {
            return bad(format!(
                "alpha, beta and gamma must be positive (alpha={}, beta={}, gamma={})",
                self.alpha, self.beta, self.gamma
            ));
        }
        if self.alpha != self.beta + self.gamma {
            return bad(format!(
                "alpha ({}) must equal beta ({}) + gamma ({})",
                self.alpha, self.beta, self.gamma
            ));
        }
        if self.score_decimals > MAX_SCORE_DECIMALS {
            return bad(format!(
                "score_decimals must be at most {MAX_SCORE_DECIMALS}, got {}",
                self.score_decimals
            ));
        }
        if let Some(cap) = self.profit_cap {
            if cap <= Money::ZERO {
                return bad(format!("profit_cap must be positive, got {cap}"));
            }
        }
        if self.max_coins_per_identity == Some(0) {
            return bad("max_coins_per_identity must be at least 1".into());
        }
        if self.window == Some(0) {
            return bad("window must be at least 1".into());
        }
        Ok(())
    }

    pub fn check_rating(&self, rating: u8) -> Result<(), MarketError> {
        if rating == 0 || rating > self.n {
            return Err(MarketError::InvalidRating { rating, n: self.n });
        }
        Ok(())
    }

    pub fn ratings(&self) -> impl Iterator<Item = u8> + Clone {
        1..=self.n
    }
}
