//! Player policies and the seeded sequential driver.
//!
//! Three kinds of participant act on one market: honest reviewers who buy
//! their true rating, attackers who push the score toward a target through
//! many identities, and strategic players who buy wherever they expect the
//! most future profit.

mod policy;
mod scenario;
mod sim;

pub use policy::{
    attacker_step, best_rating, honest_step, recent_mint_ratings, strategic_expectations,
    strategic_step, Action,
};
pub use scenario::{AgentSpec, Arrival, Policy, Preseed, ScenarioConfig, ScoreView};
pub use sim::{run_simulation, AgentAccount, Rejection, Trace};
