use std::collections::BTreeMap;

use crate::book::Identity;
use crate::decimal::Decimal;
use crate::error::MarketError;
use crate::ledger::{verify_ledger, BalanceReport};
use crate::market::Market;
use crate::money::Money;
use crate::params::MarketParams;

use super::ExperimentError;

/// One assertion of the replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone)]
pub struct WorkedExampleReport {
    pub market: Market,
    /// Published score before the first traced mint and after each one.
    pub scores: Vec<Decimal>,
    pub up_mint_payouts: BTreeMap<u8, Money>,
    pub down_mint_payouts: BTreeMap<u8, Money>,
    pub down_mint_remainder: Money,
    pub ledger: BalanceReport,
    pub checks: Vec<Check>,
}

impl WorkedExampleReport {
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| format!("{}: expected {}, got {}", c.name, c.expected, c.actual))
            .collect()
    }
}

/// The pre-trace state: four 1s, four 2s, two 3s and one 4, minted in
/// ascending rating order by one identity per coin.
pub fn worked_example_market(params: MarketParams) -> Result<Market, MarketError> {
    let mut market = Market::new(params)?;
    let mut k = 0;
    for (rating, count) in [(1u8, 4u32), (2, 4), (3, 2), (4, 1)] {
        for _ in 0..count {
            market.buy_coin(&Identity::new(format!("reviewer-{k}")), rating)?;
            k += 1;
        }
    }
    Ok(market)
}

/// Replays the worked example (a 5 minted by the restaurant owner, then a
/// 2 from an honest reviewer) under the standard parameters.
pub fn replay_worked_example() -> Result<WorkedExampleReport, ExperimentError> {
    replay_worked_example_with(MarketParams::worked_example())
}

/// Replays the worked example under `params` and compares against the
/// published golden values.
pub fn replay_worked_example_with(
    params: MarketParams,
) -> Result<WorkedExampleReport, ExperimentError> {
    let mut market = worked_example_market(params)?;
    let score_of = |m: &Market| {
        m.score()
            .map(|s| s.published())
            .expect("market is not empty")
    };

    let mut scores = vec![score_of(&market)];
    let up = market.buy_coin(&Identity::new("restaurant-owner"), 5)?;
    scores.push(score_of(&market));
    let down = market.buy_coin(&Identity::new("honest-reviewer"), 2)?;
    scores.push(score_of(&market));

    let up_plan = up.mint.plan.expect("mints carry plans");
    let down_plan = down.mint.plan.expect("mints carry plans");
    let ledger = verify_ledger(market.journal(), market.params())?;

    let payout = |plan: &BTreeMap<u8, Money>, r: u8| {
        plan.get(&r)
            .map_or_else(|| "none".to_string(), |m| m.to_string())
    };
    let mut checks = Vec::new();
    let mut check = |name: &str, expected: &str, actual: String| {
        checks.push(Check {
            name: name.to_string(),
            expected: expected.to_string(),
            actual,
        })
    };
    let golden = ["2.00", "2.25", "2.23"];
    for (i, (g, s)) in golden.iter().zip(&scores).enumerate() {
        let actual = if *s == g.parse::<Decimal>().expect("golden decimal") {
            g.to_string()
        } else {
            s.to_string()
        };
        check(&format!("score[{i}]"), g, actual);
    }
    check(
        "up mint payout c4",
        "50",
        payout(&up_plan.per_coin_payout, 4),
    );
    check(
        "up mint payout c3",
        "25",
        payout(&up_plan.per_coin_payout, 3),
    );
    check(
        "down mint payout c2",
        "16",
        payout(&down_plan.per_coin_payout, 2),
    );
    check(
        "down mint payout c1",
        "8",
        payout(&down_plan.per_coin_payout, 1),
    );
    check(
        "down mint owner remainder",
        "4",
        down_plan.owner_remainder.to_string(),
    );
    check(
        "ledger",
        "balanced",
        if ledger.is_balanced() {
            "balanced".into()
        } else {
            ledger.to_string()
        },
    );

    let report = WorkedExampleReport {
        market,
        scores,
        up_mint_payouts: up_plan.per_coin_payout,
        down_mint_payouts: down_plan.per_coin_payout,
        down_mint_remainder: down_plan.owner_remainder,
        ledger,
        checks,
    };
    let failures = report.failures();
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(ExperimentError::ReportedMismatch {
            failures,
            report: Box::new(report),
        })
    }
}
