//! Investment-weighted aggregated score.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;

/// The aggregated score: the exact weighted mean and its published,
/// rounded form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScoreRepr", into = "ScoreRepr")]
pub struct Score {
    value: Ratio<i128>,
    published: Decimal,
}

impl Score {
    pub fn new(value: Ratio<i128>, score_decimals: u32) -> Self {
        let published = Decimal::round_half_up(&value, score_decimals);
        Score { value, published }
    }

    /// Exact, unrounded score.
    pub fn value(&self) -> &Ratio<i128> {
        &self.value
    }

    pub fn published(&self) -> Decimal {
        self.published
    }

    /// Compares a rating level against the published score.
    pub fn cmp_rating(&self, rating: u8) -> Ordering {
        Decimal::from_int(rating as i64).cmp(&self.published)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.published.fmt(f)
    }
}

/// Weighted mean `sum(count_j * j) / sum(count_j)`; `counts[0]` is rating 1.
///
/// `None` when there are no coins outstanding.
pub fn aggregated_score(counts: &[u64], score_decimals: u32) -> Option<Score> {
    let (weighted, total) = counts
        .iter()
        .enumerate()
        .fold((0i128, 0i128), |(w, t), (idx, &c)| {
            (w + c as i128 * (idx as i128 + 1), t + c as i128)
        });
    if total == 0 {
        return None;
    }
    Some(Score::new(Ratio::new(weighted, total), score_decimals))
}

#[derive(Serialize, Deserialize)]
struct ScoreRepr {
    num: i128,
    den: i128,
    published: Decimal,
}

impl From<Score> for ScoreRepr {
    fn from(s: Score) -> Self {
        ScoreRepr {
            num: *s.value.numer(),
            den: *s.value.denom(),
            published: s.published,
        }
    }
}

impl TryFrom<ScoreRepr> for Score {
    type Error = String;

    fn try_from(r: ScoreRepr) -> Result<Self, Self::Error> {
        if r.den <= 0 {
            return Err(format!("score denominator must be positive, got {}", r.den));
        }
        let value = Ratio::new(r.num, r.den);
        let expected = Decimal::round_half_up(&value, r.published.scale());
        if expected != r.published {
            return Err(format!(
                "published score {} does not match {}/{}",
                r.published, r.num, r.den
            ));
        }
        Ok(Score {
            value,
            published: r.published,
        })
    }
}
