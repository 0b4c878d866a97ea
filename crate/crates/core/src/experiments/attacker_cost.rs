use std::io::Write;

use num_rational::Ratio;

use crate::agents::{run_simulation, AgentSpec, Preseed, ScenarioConfig, ScoreView};
use crate::book::Identity;
use crate::decimal::Decimal;
use crate::error::MarketError;
use crate::money::Money;
use crate::params::{MarketParams, WeightFn};

use super::ExperimentError;

/// Minor units per currency unit in cost reports.
pub const MINOR_PER_UNIT: i64 = 100;

pub const COST_CSV_HEADER: &str = "H,target,coins,gross_cost,net_cost";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostCurveRow {
    pub target: Decimal,
    pub coins_needed: u64,
    /// Price of every coin the attacker bought.
    pub gross_cost: Money,
    /// Gross cost less what the attacker's own coins earned from later
    /// mints; only known from a simulation.
    pub net_cost: Option<Money>,
    pub honest_coins: u64,
}

/// Market used for cost curves: `alpha_units` currency units per coin,
/// split evenly between sell-back price and spread.
pub fn attacker_cost_params(alpha_units: i64, n: u8) -> Result<MarketParams, MarketError> {
    let alpha = Money(alpha_units * MINOR_PER_UNIT);
    MarketParams::new(n, alpha, Money(alpha.get() / 2), 2, WeightFn::F1)
}

/// Targets 1.0, 1.1, ..., 4.9.
pub fn default_target_grid() -> Vec<Decimal> {
    (10..50).map(|units| Decimal::new(units, 1)).collect()
}

/// Fewest top-rated coins `k` lifting `honest` bottom-rated coins to an
/// exact mean of at least `target`: `ceil(H (T - 1) / (n - T))`.
pub fn attacker_cost_closed_form(
    honest: u64,
    target: Decimal,
    n: u8,
    alpha: Money,
) -> Result<CostCurveRow, MarketError> {
    let t = target.to_ratio();
    let top = Ratio::from_integer(n as i128);
    if t >= top {
        return Err(MarketError::TargetUnreachable {
            target: target.to_string(),
            n,
        });
    }
    if t < Ratio::from_integer(1) {
        return Err(MarketError::InvalidParams(format!(
            "target {target} is below 1"
        )));
    }
    let k = (Ratio::from_integer(honest as i128) * (t - 1) / (top - t))
        .ceil()
        .to_integer() as u64;
    Ok(CostCurveRow {
        target,
        coins_needed: k,
        gross_cost: alpha * k,
        net_cost: None,
        honest_coins: honest,
    })
}

/// Seeds `honest` bottom-rated coins, lets a top-rating attacker buy until
/// the exact score reaches `target`, and reports what it spent.
pub fn simulate_attack(
    honest: u64,
    target: Decimal,
    params: &MarketParams,
    max_coins: u64,
) -> Result<CostCurveRow, MarketError> {
    let scenario = ScenarioConfig {
        params: params.clone(),
        agents: vec![
            AgentSpec::attacker("attacker", Money(i64::MAX / 2), target, params.n, 1)
                .with_score_view(ScoreView::Exact),
        ],
        steps: max_coins,
        seed: 0,
        arrival: Default::default(),
        preseed: vec![Preseed {
            identity: Identity::new("honest"),
            rating: 1,
            count: honest,
        }],
    };
    let trace = run_simulation(&scenario)?;
    let account = &trace.accounts["attacker"];
    Ok(CostCurveRow {
        target,
        coins_needed: account.coins_bought,
        gross_cost: account.spent,
        net_cost: Some(-account.net()),
        honest_coins: honest,
    })
}

/// One row per `(H, target)` in ascending order, each simulated on an
/// isolated market and checked against the closed form.
pub fn attacker_cost_curve(
    honest_values: &[u64],
    targets: &[Decimal],
    params: &MarketParams,
) -> Result<Vec<CostCurveRow>, ExperimentError> {
    if honest_values.is_empty() {
        return Err(MarketError::InvalidParams("need at least one H value".into()).into());
    }
    let mut hs = honest_values.to_vec();
    hs.sort_unstable();
    hs.dedup();
    let mut ts = targets.to_vec();
    ts.sort();

    let points: Vec<(u64, Decimal)> = hs
        .iter()
        .flat_map(|&h| ts.iter().map(move |&t| (h, t)))
        .collect();
    for &(h, t) in &points {
        attacker_cost_closed_form(h, t, params.n, params.alpha)?;
    }

    // independent markets; run them side by side
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(points.len().max(1));
    let chunk = points.len().div_ceil(workers).max(1);
    let results: Vec<Result<CostCurveRow, ExperimentError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&(h, t)| curve_point(h, t, params))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("cost worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}

fn curve_point(
    honest: u64,
    target: Decimal,
    params: &MarketParams,
) -> Result<CostCurveRow, ExperimentError> {
    let closed = attacker_cost_closed_form(honest, target, params.n, params.alpha)?;
    let simulated = simulate_attack(honest, target, params, closed.coins_needed + 1)?;
    if simulated.coins_needed != closed.coins_needed {
        return Err(ExperimentError::ClosedFormMismatch {
            honest,
            target: target.to_string(),
            simulated: simulated.coins_needed,
            closed_form: closed.coins_needed,
        });
    }
    Ok(simulated)
}

/// Writes the cost CSV with money in currency units.
pub fn write_cost_csv<W: Write>(
    mut out: W,
    rows: &[CostCurveRow],
    minor_per_unit: i64,
) -> std::io::Result<()> {
    writeln!(out, "{COST_CSV_HEADER}")?;
    for row in rows {
        let net = row
            .net_cost
            .map(|m| m.to_major_string(minor_per_unit))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            row.honest_coins,
            row.target,
            row.coins_needed,
            row.gross_cost.to_major_string(minor_per_unit),
            net
        )?;
    }
    Ok(())
}
