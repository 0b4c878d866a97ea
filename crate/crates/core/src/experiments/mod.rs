//! Reproducible experiments: the worked-example replay and the cost an
//! attacker pays to drag a score upward.

mod attacker_cost;
mod worked_example;

use thiserror::Error;

use crate::error::MarketError;

pub use attacker_cost::{
    attacker_cost_closed_form, attacker_cost_curve, attacker_cost_params, default_target_grid,
    simulate_attack, write_cost_csv, CostCurveRow, COST_CSV_HEADER, MINOR_PER_UNIT,
};
pub use worked_example::{
    replay_worked_example, replay_worked_example_with, worked_example_market, Check,
    WorkedExampleReport,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("simulated {simulated} coins for H={honest}, target {target}; closed form gives {closed_form}")]
    ClosedFormMismatch {
        honest: u64,
        target: String,
        simulated: u64,
        closed_form: u64,
    },
    #[error("worked example mismatch: {}", failures.join("; "))]
    ReportedMismatch {
        failures: Vec<String>,
        report: Box<WorkedExampleReport>,
    },
}
