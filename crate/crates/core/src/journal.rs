//! Append-only event journal and its line-delimited JSON encoding.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::book::Identity;
use crate::distribution::DistributionPlan;
use crate::error::MarketError;
use crate::money::Money;
use crate::score::{aggregated_score, Score};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Mint,
    Burn,
    Buyback,
}

/// One market event. Mints carry their distribution plan; burns and
/// buybacks never do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalEvent {
    pub seq: u64,
    pub kind: EventKind,
    pub identity: Identity,
    pub rating: u8,
    pub cash_in: Money,
    pub cash_out: Money,
    pub plan: Option<DistributionPlan>,
    pub score_after: Option<Score>,
}

impl JournalEvent {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("journal events always serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        let mut event: JournalEvent = serde_json::from_str(line)?;
        if let Some(plan) = event.plan.as_mut() {
            plan.mint_rating = event.rating;
        }
        Ok(event)
    }
}

/// Reads a journal; any unparsable line (including a truncated last line)
/// is reported with its 1-based line number.
pub fn read_journal<R: BufRead>(reader: R) -> Result<Vec<JournalEvent>, MarketError> {
    let mut events = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| MarketError::CorruptJournal {
            line: line_no,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let event =
            JournalEvent::from_json_line(&line).map_err(|e| MarketError::CorruptJournal {
                line: line_no,
                reason: e.to_string(),
            })?;
        events.push(event);
    }
    Ok(events)
}

pub fn write_journal<W: Write>(mut writer: W, events: &[JournalEvent]) -> std::io::Result<()> {
    for event in events {
        writeln!(writer, "{}", event.to_json_line())?;
    }
    Ok(())
}

/// Aggregated score over the net coins (mints minus burns and buybacks) of
/// the last `window` events.
///
/// A level whose burns in the window outnumber its mints counts as zero.
pub fn windowed_score(
    journal: &[JournalEvent],
    window: usize,
    score_decimals: u32,
) -> Option<Score> {
    let start = journal.len().saturating_sub(window);
    let mut net: BTreeMap<u8, i64> = BTreeMap::new();
    for event in &journal[start..] {
        let delta = match event.kind {
            EventKind::Mint => 1,
            EventKind::Burn | EventKind::Buyback => -1,
        };
        *net.entry(event.rating).or_default() += delta;
    }
    let top = net.keys().next_back().copied().unwrap_or(0);
    let counts: Vec<u64> = (1..=top)
        .map(|r| net.get(&r).copied().unwrap_or(0).max(0) as u64)
        .collect();
    aggregated_score(&counts, score_decimals)
}
