//! Command-line front end for rating markets.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use reward_rating::agents::{run_simulation, ScenarioConfig};
use reward_rating::experiments::{
    attacker_cost_curve, attacker_cost_params, default_target_grid, replay_worked_example_with,
    write_cost_csv, ExperimentError, MINOR_PER_UNIT,
};
use reward_rating::{verify_ledger, Decimal, Identity, MarketError, MarketParams, WeightFn};

use reward_rating_cli::{load_params, state_summary, store, MarketDir};

#[derive(Parser)]
#[command(
    name = "reward-rating",
    version,
    about = "Stock-market style rating markets"
)]
struct Cli {
    /// Market directory holding config.json and journal.jsonl.
    #[arg(long, global = true, env = "REWARD_RATING_DIR", default_value = ".")]
    dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a market directory.
    Init {
        /// JSON file with market parameters; defaults to the worked-example market.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Buy (mint) one coin.
    Buy {
        #[arg(long)]
        user: String,
        #[arg(long)]
        rating: u8,
    },
    /// Sell one coin back to the market.
    Sell {
        #[arg(long)]
        user: String,
        #[arg(long)]
        rating: u8,
    },
    /// Print the published aggregated score.
    Score {
        /// Only count the last W events.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Run an agent scenario and emit its journal.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Journal output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Print the rebuilt market state as JSON.
    State,
    /// Audit the market journal.
    Verify,
    /// Replay the worked example and check it against the golden values.
    ReplayExample {
        #[arg(long, value_enum, default_value_t = WeightArg::F1)]
        weight_fn: WeightArg,
        #[arg(long, default_value_t = 2)]
        score_decimals: u32,
        /// Also write the replayed market into the market directory.
        #[arg(long)]
        save: bool,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Coins an attacker needs to lift a bottom-rated service to each target.
    AttackerCost {
        /// Honest base sizes, comma separated.
        #[arg(long = "H", value_delimiter = ',', default_values_t = [100u64, 200, 500])]
        honest: Vec<u64>,
        /// Comma-separated targets or `start:end:step`; default 1.0:4.9:0.1.
        #[arg(long, value_parser = parse_targets)]
        targets: Option<TargetGrid>,
        /// Coin price in currency units.
        #[arg(long, default_value_t = 1)]
        alpha: i64,
        #[arg(long, default_value_t = 5)]
        n: u8,
        /// CSV output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    F1,
    F2,
}

#[derive(Clone, Debug)]
struct TargetGrid(Vec<Decimal>);

fn parse_targets(text: &str) -> Result<TargetGrid, String> {
    let parse = |s: &str| s.parse::<Decimal>().map_err(|e| e.to_string());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, end, step] => {
            let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
            let scale = start.scale().max(end.scale()).max(step.scale());
            let at = |d: Decimal| d.units() * 10i128.pow(scale - d.scale());
            let (lo, hi, inc) = (at(start), at(end), at(step));
            if inc <= 0 {
                return Err("step must be positive".into());
            }
            if hi < lo {
                return Err("end is below start".into());
            }
            Ok(TargetGrid(
                (0..)
                    .map(|i| lo + i * inc)
                    .take_while(|&u| u <= hi)
                    .map(|u| Decimal::new(u, scale))
                    .collect(),
            ))
        }
        [_] => text
            .split(',')
            .map(|s| parse(s.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map(TargetGrid),
        _ => Err(format!("cannot read targets {text:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            let market_err = err.downcast_ref::<MarketError>().or_else(|| {
                match err.downcast_ref::<ExperimentError>() {
                    Some(ExperimentError::Market(e)) => Some(e),
                    _ => None,
                }
            });
            match market_err {
                Some(e) => eprintln!("error: {}: {e}", e.name()),
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let dir = MarketDir::new(&cli.dir);
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Init { config, force } => {
            let params = match config {
                Some(path) => load_params(&path)?,
                None => MarketParams::worked_example(),
            };
            let _lock = dir.lock()?;
            dir.init(&params, force)?;
            writeln!(stdout, "initialized {}", cli.dir.display())?;
        }
        Command::Buy { user, rating } => {
            let _lock = dir.lock()?;
            let mut market = dir.open()?;
            let outcome = market.buy_coin(&Identity::new(user), rating)?;
            let events: Vec<_> = outcome.events().cloned().collect();
            dir.append(&events)?;
            for event in &events {
                writeln!(stdout, "{}", describe(event))?;
            }
        }
        Command::Sell { user, rating } => {
            let _lock = dir.lock()?;
            let mut market = dir.open()?;
            let event = market.sell_coin(&Identity::new(user), rating)?;
            dir.append(std::slice::from_ref(&event))?;
            writeln!(stdout, "{}", describe(&event))?;
        }
        Command::Score { window } => {
            let market = dir.open()?;
            let score = match window {
                Some(w) => market.windowed_score(w),
                None => market.published_score(),
            };
            match score {
                Some(s) => writeln!(stdout, "{s}")?,
                None => writeln!(stdout, "none")?,
            }
        }
        Command::Simulate {
            scenario,
            seed,
            out,
        } => {
            let text = fs::read_to_string(&scenario)
                .with_context(|| format!("reading {}", scenario.display()))?;
            let mut config: ScenarioConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", scenario.display()))?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let trace = run_simulation(&config)?;
            let mut journal = Vec::new();
            reward_rating::write_journal(&mut journal, trace.journal())?;
            let mut summary = Vec::new();
            let score = trace
                .market
                .score()
                .map_or("none".to_string(), |s| s.to_string());
            writeln!(
                summary,
                "steps {} events {} score {} rejections {}",
                config.steps,
                trace.journal().len(),
                score,
                trace.rejections.len()
            )?;
            for (name, acct) in &trace.accounts {
                writeln!(
                    summary,
                    "{name}: bought {} spent {} received {} net {}",
                    acct.coins_bought,
                    acct.spent,
                    acct.received(),
                    acct.net()
                )?;
            }
            match out {
                Some(path) => {
                    store::write_atomic(&path, &journal)?;
                    stdout.write_all(&summary)?;
                }
                None => {
                    stdout.write_all(&journal)?;
                    io::stderr().write_all(&summary)?;
                }
            }
        }
        Command::Experiment(Experiment::AttackerCost {
            honest,
            targets,
            alpha,
            n,
            out,
        }) => {
            let params = attacker_cost_params(alpha, n)?;
            let targets = targets.map(|t| t.0).unwrap_or_else(default_target_grid);
            let rows = attacker_cost_curve(&honest, &targets, &params)?;
            let mut csv = Vec::new();
            write_cost_csv(&mut csv, &rows, MINOR_PER_UNIT)?;
            match out {
                Some(path) => store::write_atomic(&path, &csv)?,
                None => stdout.write_all(&csv)?,
            }
        }
        Command::State => {
            let market = dir.open()?;
            writeln!(
                stdout,
                "{}",
                serde_json::to_string_pretty(&state_summary(&market))?
            )?;
        }
        Command::Verify => {
            let params = dir.params()?;
            let events = dir.events()?;
            let report = verify_ledger(&events, &params)?;
            writeln!(stdout, "{report}")?;
            if !report.is_balanced() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::ReplayExample {
            weight_fn,
            score_decimals,
            save,
            force,
        } => {
            let mut params = MarketParams::worked_example();
            params.weight_fn = match weight_fn {
                WeightArg::F1 => WeightFn::F1,
                WeightArg::F2 => WeightFn::F2,
            };
            params.score_decimals = score_decimals;
            params.validate()?;
            let (report, ok) = match replay_worked_example_with(params) {
                Ok(report) => (report, true),
                Err(ExperimentError::ReportedMismatch { report, .. }) => (*report, false),
                Err(e) => return Err(e.into()),
            };
            let scores: Vec<String> = report.scores.iter().map(|s| s.to_string()).collect();
            writeln!(stdout, "scores {}", scores.join(" -> "))?;
            for check in &report.checks {
                let tag = if check.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    stdout,
                    "{tag} {}: expected {}, got {}",
                    check.name, check.expected, check.actual
                )?;
            }
            if save {
                let _lock = dir.lock()?;
                dir.save_market(&report.market, force)?;
                writeln!(
                    stdout,
                    "saved {} events to {}",
                    report.market.journal().len(),
                    cli.dir.display()
                )?;
            }
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn describe(event: &reward_rating::JournalEvent) -> String {
    let score = event
        .score_after
        .as_ref()
        .map_or("none".to_string(), |s| s.to_string());
    let mut line = format!(
        "{:?} seq={} user={} rating={} in={} out={} score={}",
        event.kind, event.seq, event.identity, event.rating, event.cash_in, event.cash_out, score
    );
    if let Some(plan) = &event.plan {
        let payouts: Vec<String> = plan
            .per_coin_payout
            .iter()
            .map(|(w, p)| format!("c{w}:{p}"))
            .collect();
        line.push_str(&format!(
            " payouts=[{}] owner={}",
            payouts.join(","),
            plan.owner_remainder
        ));
    }
    line
}
