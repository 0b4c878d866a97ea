//! Brute-force reference for the profit split, written against the formula
//! directly: holders are enumerated coin by coin, the score is rounded with
//! plain integer arithmetic, and weights are rebuilt from their definitions.

#![allow(dead_code)]

use num_rational::Ratio;

pub type Q = Ratio<i128>;

/// Published score scaled by `10^decimals`, or `None` for an empty market.
pub fn published_scaled(counts: &[u64], decimals: u32) -> Option<i128> {
    let mut sum = 0i128;
    let mut total = 0i128;
    for (i, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            sum += i as i128 + 1;
            total += 1;
        }
    }
    if total == 0 {
        return None;
    }
    let pow = 10i128.pow(decimals);
    // half-up: floor(sum * pow / total + 1/2)
    let mut scaled = sum * pow / total;
    let rem = sum * pow - scaled * total;
    if 2 * rem >= total {
        scaled += 1;
    }
    Some(scaled)
}

pub fn f1(w: u8, j: u8) -> Q {
    let d = (w as i32 - j as i32).unsigned_abs();
    let mut den = 1i128;
    for _ in 0..=d {
        den *= 2;
    }
    Q::new(1, den)
}

pub fn f2(w: u8, j: u8) -> Q {
    let d = (w as i32 - j as i32).unsigned_abs() as i128;
    Q::new(1, 2 + d)
}

#[derive(Debug)]
pub struct OraclePlan {
    pub winners: Vec<u8>,
    /// (rating, floored per-coin payout) for every winner rating with coins.
    pub payouts: Vec<(u8, i64)>,
    pub remainder: i64,
}

pub fn oracle_plan(counts: &[u64], j: u8, gamma: i64, decimals: u32, use_f2: bool) -> OraclePlan {
    let n = counts.len() as u8;
    let f = |w: u8| if use_f2 { f2(w, j) } else { f1(w, j) };
    let Some(sigma) = published_scaled(counts, decimals) else {
        return OraclePlan {
            winners: vec![],
            payouts: vec![],
            remainder: gamma,
        };
    };
    let pow = 10i128.pow(decimals);
    let jj = j as i128 * pow;
    let winners: Vec<u8> = (1..=n)
        .filter(|&i| {
            let ii = i as i128 * pow;
            if jj > sigma {
                ii > sigma
            } else if jj < sigma {
                ii < sigma
            } else {
                true
            }
        })
        .collect();

    // one entry per coin
    let holders: Vec<u8> = (1..=n)
        .flat_map(|r| std::iter::repeat_n(r, counts[r as usize - 1] as usize))
        .filter(|r| winners.contains(r))
        .collect();
    let mut denom = Q::from_integer(0);
    for &r in &holders {
        denom += f(r);
    }
    if denom == Q::from_integer(0) {
        return OraclePlan {
            winners,
            payouts: vec![],
            remainder: gamma,
        };
    }
    let mut paid = 0i64;
    let mut payouts = Vec::new();
    for &r in &winners {
        if counts[r as usize - 1] == 0 {
            continue;
        }
        let p = (Q::from_integer(gamma as i128) * f(r) / denom)
            .floor()
            .to_integer() as i64;
        payouts.push((r, p));
    }
    for &r in &holders {
        paid += payouts.iter().find(|(w, _)| *w == r).unwrap().1;
    }
    OraclePlan {
        winners,
        payouts,
        remainder: gamma - paid,
    }
}

/// Unfloored per-coin payouts in floating point.
pub fn float_payouts(
    counts: &[u64],
    winners: &[u8],
    j: u8,
    gamma: i64,
    use_f2: bool,
) -> Vec<(u8, f64)> {
    let f = |w: u8| -> f64 {
        let d = (w as f64 - j as f64).abs();
        if use_f2 {
            1.0 / (2.0 + d)
        } else {
            0.5f64.powf(d + 1.0)
        }
    };
    let denom: f64 = winners
        .iter()
        .map(|&q| counts[q as usize - 1] as f64 * f(q))
        .sum();
    winners
        .iter()
        .filter(|&&w| counts[w as usize - 1] > 0)
        .map(|&w| (w, gamma as f64 * f(w) / denom))
        .collect()
}
