//! Independent journal audit: budget balance, reserve coverage and global
//! conservation, checked event by event.

use std::fmt;

use crate::distribution::compute_distribution;
use crate::error::MarketError;
use crate::journal::{EventKind, JournalEvent};
use crate::money::Money;
use crate::params::MarketParams;
use crate::score::aggregated_score;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Payouts plus owner remainder differ from the spread.
    BudgetImbalance,
    /// Reserve differs from sell-back price times outstanding coins.
    ReserveMismatch,
    /// Cash in differs from cash out plus everything held in the system.
    ConservationBreach,
    /// The recorded plan is not the one the mechanism would produce.
    PlanMismatch,
    /// A mint or burn was recorded at the wrong price.
    PriceMismatch,
    /// Burn of a rating with no outstanding coins.
    Overdrawn,
    ScoreMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub seq: u64,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at seq {}: {}", self.kind, self.seq, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceReport {
    pub events_checked: usize,
    pub cash_in: Money,
    pub cash_out: Money,
    pub reserve: Money,
    pub owner_balance: Money,
    pub stakeholder_credits: Money,
    pub violation: Option<Violation>,
}

impl BalanceReport {
    pub fn is_balanced(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for BalanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(
                f,
                "balanced ({} events; in {}, out {}, reserve {}, owner {}, credits {})",
                self.events_checked,
                self.cash_in,
                self.cash_out,
                self.reserve,
                self.owner_balance,
                self.stakeholder_credits
            ),
            Some(v) => write!(f, "violation: {v}"),
        }
    }
}

/// Replays `journal` from cash flows alone and reports the first event that
/// breaks budget balance, reserve coverage or conservation.
///
/// Structural problems (sequence gaps, a mint without a plan, an
/// out-of-range rating) are `CorruptJournal` errors rather than violations.
pub fn verify_ledger(
    journal: &[JournalEvent],
    params: &MarketParams,
) -> Result<BalanceReport, MarketError> {
    params.validate()?;
    let mut counts = vec![0u64; params.n as usize];
    let mut report = BalanceReport {
        events_checked: 0,
        cash_in: Money::ZERO,
        cash_out: Money::ZERO,
        reserve: Money::ZERO,
        owner_balance: Money::ZERO,
        stakeholder_credits: Money::ZERO,
        violation: None,
    };

    for (idx, event) in journal.iter().enumerate() {
        let corrupt = |reason: String| MarketError::CorruptJournal {
            line: idx + 1,
            reason,
        };
        if event.seq != idx as u64 + 1 {
            return Err(corrupt(format!(
                "expected seq {}, found {}",
                idx + 1,
                event.seq
            )));
        }
        if event.rating == 0 || event.rating > params.n {
            return Err(corrupt(format!("rating {} out of range", event.rating)));
        }
        let violation = |kind, detail: String| Violation {
            seq: event.seq,
            kind,
            detail,
        };
        let r = event.rating as usize - 1;

        let found = match event.kind {
            EventKind::Mint => {
                let plan = event
                    .plan
                    .as_ref()
                    .ok_or_else(|| corrupt("mint without a plan".into()))?;
                if plan.per_coin_payout.keys().any(|&w| w == 0 || w > params.n) {
                    return Err(corrupt("payout to a rating out of range".into()));
                }
                let distributed: Money = plan
                    .per_coin_payout
                    .iter()
                    .map(|(&w, &p)| p * counts[w as usize - 1])
                    .sum();
                let expected = compute_distribution(
                    &counts,
                    aggregated_score(&counts, params.score_decimals).as_ref(),
                    event.rating,
                    params,
                )?;

                report.cash_in += event.cash_in;
                report.cash_out += event.cash_out;
                report.stakeholder_credits += distributed;
                report.owner_balance += plan.owner_remainder;
                report.reserve +=
                    event.cash_in - event.cash_out - distributed - plan.owner_remainder;
                counts[r] += 1;

                if distributed + plan.owner_remainder != params.gamma {
                    Some(violation(
                        ViolationKind::BudgetImbalance,
                        format!(
                            "payouts {distributed} + remainder {} != gamma {}",
                            plan.owner_remainder, params.gamma
                        ),
                    ))
                } else if plan.per_coin_payout.values().any(|p| *p < Money::ZERO)
                    || plan.owner_remainder < Money::ZERO
                {
                    Some(violation(
                        ViolationKind::BudgetImbalance,
                        "negative payout".into(),
                    ))
                } else if event.cash_in != params.alpha || event.cash_out != Money::ZERO {
                    Some(violation(
                        ViolationKind::PriceMismatch,
                        format!("mint cash in {} out {}", event.cash_in, event.cash_out),
                    ))
                } else if expected.winners != plan.winners
                    || expected.per_coin_payout != plan.per_coin_payout
                {
                    Some(violation(
                        ViolationKind::PlanMismatch,
                        format!(
                            "expected {:?}, recorded {:?}",
                            expected.per_coin_payout, plan.per_coin_payout
                        ),
                    ))
                } else {
                    None
                }
            }
            EventKind::Burn | EventKind::Buyback => {
                if event.plan.is_some() {
                    return Err(corrupt("burn carrying a plan".into()));
                }
                report.cash_in += event.cash_in;
                report.cash_out += event.cash_out;
                report.reserve += event.cash_in - event.cash_out;
                if counts[r] == 0 {
                    Some(violation(
                        ViolationKind::Overdrawn,
                        format!("no outstanding coin of rating {}", event.rating),
                    ))
                } else {
                    counts[r] -= 1;
                    if event.cash_out != params.beta || event.cash_in != Money::ZERO {
                        Some(violation(
                            ViolationKind::PriceMismatch,
                            format!("burn cash in {} out {}", event.cash_in, event.cash_out),
                        ))
                    } else {
                        None
                    }
                }
            }
        };
        report.events_checked += 1;

        let outstanding: u64 = counts.iter().sum();
        let found = found
            .or_else(|| {
                (report.reserve != params.beta * outstanding).then(|| {
                    violation(
                        ViolationKind::ReserveMismatch,
                        format!("reserve {} for {outstanding} coins", report.reserve),
                    )
                })
            })
            .or_else(|| {
                let held = report.reserve + report.owner_balance + report.stakeholder_credits;
                (report.cash_in - report.cash_out != held).then(|| {
                    violation(
                        ViolationKind::ConservationBreach,
                        format!(
                            "net inflow {} vs held {held}",
                            report.cash_in - report.cash_out
                        ),
                    )
                })
            })
            .or_else(|| {
                let score = aggregated_score(&counts, params.score_decimals);
                (score != event.score_after).then(|| {
                    violation(
                        ViolationKind::ScoreMismatch,
                        format!(
                            "recorded {:?}, recomputed {:?}",
                            event.score_after.as_ref().map(|s| s.to_string()),
                            score.as_ref().map(|s| s.to_string())
                        ),
                    )
                })
            });
        if found.is_some() {
            report.violation = found;
            return Ok(report);
        }
    }
    Ok(report)
}
