//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p reward-rating-cli --test acceptance`.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reward_rating::agents::{run_simulation, AgentSpec, Arrival, ScenarioConfig};
use reward_rating::experiments::{
    attacker_cost_curve, attacker_cost_params, default_target_grid, replay_worked_example,
    MINOR_PER_UNIT,
};
use reward_rating::{verify_ledger, EventKind, Identity, Market, MarketParams, Money, WeightFn};
use reward_rating_cli::{rebuild_state, state_summary};

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const PROPERTY_LIMIT: Duration = Duration::from_secs(30);
const ATTACKER_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_LIMIT: Duration = Duration::from_secs(10);

const PROPERTY_SEQUENCES: usize = 10_000;
const PROPERTY_MAX_OPS: usize = 40;
const PROPERTY_MAX_GAMMA: i64 = 1_000_000;
const ORACLE_STATES: usize = 1_000;
const ORACLE_MAX_COUNT: u64 = 50;
const HONEST_BASES: [u64; 3] = [100, 200, 500];
const CONVERGENCE_STEPS: u64 = 200;
const DETERMINISM_SEED: &str = "42";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{detail}; took {took:.2?}, limit {limit:?}"));
    }
    Ok(format!("{detail}; {took:.2?}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_example() -> Outcome {
    timed(GOLDEN_LIMIT, || {
        let report = replay_worked_example().map_err(|e| e.to_string())?;
        let scores: Vec<String> = report.scores.iter().map(|s| s.to_string()).collect();
        ensure(scores == ["2.00", "2.25", "2.23"], || {
            format!("scores {scores:?}")
        })?;
        let up: Vec<(u8, i64)> = report
            .up_mint_payouts
            .iter()
            .map(|(&w, m)| (w, m.get()))
            .collect();
        let down: Vec<(u8, i64)> = report
            .down_mint_payouts
            .iter()
            .map(|(&w, m)| (w, m.get()))
            .collect();
        ensure(up == [(3, 25), (4, 50)], || {
            format!("mint-1 payouts {up:?}")
        })?;
        ensure(down == [(1, 8), (2, 16)], || {
            format!("mint-2 payouts {down:?}")
        })?;
        ensure(report.down_mint_remainder == Money(4), || {
            format!("mint-2 remainder {}", report.down_mint_remainder)
        })?;
        ensure(report.ledger.is_balanced(), || report.ledger.to_string())?;
        Ok("sigma 2.00 -> 2.25 -> 2.23, payouts 50/25 and 16/8, remainder 4".into())
    })
}

fn random_params(rng: &mut ChaCha8Rng) -> MarketParams {
    let n = [3u8, 5, 9][rng.gen_range(0..3)];
    let wf = if rng.gen() {
        WeightFn::F2
    } else {
        WeightFn::F1
    };
    let gamma = rng.gen_range(1..=PROPERTY_MAX_GAMMA);
    let beta = rng.gen_range(1..=1_000);
    let decimals = rng.gen_range(0..=3);
    let mut params = MarketParams::new(n, Money(beta + gamma), Money(beta), decimals, wf).unwrap();
    if rng.gen_ratio(1, 4) {
        params.profit_cap = Some(Money(rng.gen_range(1..=2 * gamma)));
    }
    params
}

fn budget_balance_suite() -> Outcome {
    timed(PROPERTY_LIMIT, || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut mints = 0u64;
        let mut events = 0u64;
        for case in 0..PROPERTY_SEQUENCES {
            let params = random_params(&mut rng);
            let mut market = Market::new(params.clone()).unwrap();
            let ops = rng.gen_range(1..=PROPERTY_MAX_OPS);
            for _ in 0..ops {
                let who = Identity::new(format!("u{}", rng.gen_range(0..6)));
                let rating = rng.gen_range(1..=params.n);
                let counts_before = market.state().counts.clone();
                if rng.gen_ratio(3, 4) {
                    let outcome = market
                        .buy_coin(&who, rating)
                        .map_err(|e| format!("case {case}: {e}"))?;
                    let plan = outcome.mint.plan.as_ref().ok_or("mint without plan")?;
                    let split = plan.distributed(&counts_before) + plan.owner_remainder;
                    ensure(split == params.gamma, || {
                        format!("case {case}: split {split} != gamma {}", params.gamma)
                    })?;
                    mints += 1;
                } else {
                    let _ = market.sell_coin(&who, rating);
                }
                let st = market.state();
                ensure(st.reserve == params.beta * st.total_coins(), || {
                    format!(
                        "case {case}: reserve {} for {} coins",
                        st.reserve,
                        st.total_coins()
                    )
                })?;
            }
            events += market.journal().len() as u64;
            ensure(
                market
                    .journal()
                    .iter()
                    .all(|e| e.kind != EventKind::Mint || e.plan.is_some()),
                || format!("case {case}: mint without plan"),
            )?;
            let report = verify_ledger(market.journal(), &params).map_err(|e| e.to_string())?;
            ensure(report.is_balanced(), || format!("case {case}: {report}"))?;
        }
        Ok(format!(
            "{PROPERTY_SEQUENCES} sequences, {mints} mints, {events} events"
        ))
    })
}

fn closed_form(h: u64, target_tenths: u64) -> u64 {
    // k = ceil(H (T - 1) / (5 - T)) with T in tenths
    let num = h * (target_tenths - 10);
    let den = 50 - target_tenths;
    num.div_ceil(den)
}

fn attacker_cost() -> Outcome {
    timed(ATTACKER_LIMIT, || {
        let params = attacker_cost_params(1, 5).map_err(|e| e.to_string())?;
        let grid = default_target_grid();
        ensure(grid.len() == 40, || {
            format!("grid has {} points", grid.len())
        })?;
        let rows = attacker_cost_curve(&HONEST_BASES, &grid, &params).map_err(|e| e.to_string())?;
        ensure(rows.len() == HONEST_BASES.len() * grid.len(), || {
            format!("{} rows", rows.len())
        })?;
        let mut curves: Vec<Vec<u64>> = Vec::new();
        for (hi, &h) in HONEST_BASES.iter().enumerate() {
            let curve = &rows[hi * grid.len()..(hi + 1) * grid.len()];
            let mut coins = Vec::new();
            for (row, target) in curve.iter().zip(&grid) {
                ensure(row.honest_coins == h && row.target == *target, || {
                    format!("row order: H={} T={}", row.honest_coins, row.target)
                })?;
                let tenths = (target.units() * 10 / 10i128.pow(target.scale())) as u64;
                let want = closed_form(h, tenths);
                ensure(row.coins_needed == want, || {
                    format!(
                        "H={h} T={target}: simulated {} vs closed form {want}",
                        row.coins_needed
                    )
                })?;
                coins.push(row.coins_needed);
            }
            ensure(coins.windows(2).all(|w| w[0] <= w[1]), || {
                format!("H={h} curve not monotone")
            })?;
            let at3 = curve
                .iter()
                .find(|r| r.target.to_string() == "3.0")
                .ok_or("no T=3.0")?;
            ensure(at3.gross_cost == Money(h as i64 * MINOR_PER_UNIT), || {
                format!("H={h} gross at 3.0 = {}", at3.gross_cost)
            })?;
            curves.push(coins);
        }
        for pair in curves.windows(2) {
            ensure(pair[0].iter().zip(&pair[1]).all(|(a, b)| a <= b), || {
                "curves not ordered by H".into()
            })?;
        }
        Ok(format!(
            "{} points equal closed form; gross at 3.0 = 100/200/500",
            rows.len()
        ))
    })
}

fn oracle_equivalence() -> Outcome {
    timed(ORACLE_LIMIT, || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for case in 0..ORACLE_STATES {
            let n = [3u8, 5, 9][rng.gen_range(0..3)];
            let use_f2 = rng.gen();
            let decimals = rng.gen_range(0..=3);
            let gamma = rng.gen_range(1..=PROPERTY_MAX_GAMMA);
            let wf = if use_f2 { WeightFn::F2 } else { WeightFn::F1 };
            let params = MarketParams::new(n, Money(gamma + 1), Money(1), decimals, wf).unwrap();
            let counts: Vec<u64> = (0..n)
                .map(|_| {
                    if rng.gen_ratio(1, 4) {
                        0
                    } else {
                        rng.gen_range(0..=ORACLE_MAX_COUNT)
                    }
                })
                .collect();
            let j = rng.gen_range(1..=n);
            let score = reward_rating::aggregated_score(&counts, decimals);
            let plan = reward_rating::compute_distribution(&counts, score.as_ref(), j, &params)
                .map_err(|e| e.to_string())?;
            let want = oracle::oracle_plan(&counts, j, gamma, decimals, use_f2);
            let got: Vec<(u8, i64)> = plan
                .per_coin_payout
                .iter()
                .map(|(&w, m)| (w, m.get()))
                .collect();
            ensure(
                plan.winners == want.winners
                    && got == want.payouts
                    && plan.owner_remainder.get() == want.remainder,
                || format!("case {case}: counts {counts:?} j={j}: {plan:?} vs {want:?}"),
            )?;
        }
        Ok(format!("{ORACLE_STATES} random states match"))
    })
}

fn determinism() -> Outcome {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mixed.json");
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let mut journals = Vec::new();
    for run in 0..2 {
        let out_path = tmp.path().join(format!("run{run}.jsonl"));
        let out = Command::new(env!("CARGO_BIN_EXE_reward-rating"))
            .args(["simulate", "--scenario"])
            .arg(&scenario)
            .args(["--seed", DETERMINISM_SEED, "--out"])
            .arg(&out_path)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        journals.push(fs::read(&out_path).map_err(|e| e.to_string())?);
    }
    ensure(journals[0] == journals[1], || {
        "journals differ between runs".into()
    })?;

    let mut config: ScenarioConfig =
        serde_json::from_str(&fs::read_to_string(&scenario).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    config.seed = DETERMINISM_SEED.parse().unwrap();
    let trace = run_simulation(&config).map_err(|e| e.to_string())?;
    let rebuilt = rebuild_state(&tmp.path().join("run0.jsonl"), config.params.clone())
        .map_err(|e| e.to_string())?;
    ensure(rebuilt.state() == trace.market.state(), || {
        "rebuilt state differs".into()
    })?;
    ensure(
        state_summary(&rebuilt) == state_summary(&trace.market),
        || "rebuilt summary differs".into(),
    )?;
    Ok(format!(
        "{} journal bytes identical; rebuilt state equals in-memory state",
        journals[0].len()
    ))
}

fn honest_convergence() -> Outcome {
    let config = ScenarioConfig {
        params: MarketParams::worked_example(),
        agents: vec![AgentSpec::honest(
            "honest",
            Money(i64::MAX / 4),
            vec![0, 0, 0, 1, 0],
            1.0,
        )],
        steps: CONVERGENCE_STEPS,
        seed: 42,
        arrival: Arrival::RoundRobin,
        preseed: vec![],
    };
    let trace = run_simulation(&config).map_err(|e| e.to_string())?;
    let score = trace.market.score().map(|s| s.to_string());
    ensure(score.as_deref() == Some("4.00"), || {
        format!("final score {score:?}")
    })?;
    Ok(format!("{CONVERGENCE_STEPS} steps, sigma 4.00"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("golden example", golden_example),
        ("budget balance property suite", budget_balance_suite),
        ("attacker cost curve", attacker_cost),
        ("oracle equivalence", oracle_equivalence),
        ("determinism", determinism),
        ("honest convergence", honest_convergence),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
