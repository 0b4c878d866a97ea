//! Integer money in minor currency units.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// An amount of money in minor units (e.g. cents).
///
/// All money paths in the market are integer; fractional shares only exist
/// as exact rationals while a distribution is being planned.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Money(pub i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn minor(units: i64) -> Self {
        Money(units)
    }

    pub const fn get(self) -> i64 {
        self.0
    }

    pub fn checked_mul_count(self, count: u64) -> Option<Money> {
        i64::try_from(count)
            .ok()
            .and_then(|c| self.0.checked_mul(c))
            .map(Money)
    }

    /// Formats the amount in major units given `minor_per_unit`, trimming
    /// trailing zeros: 10000 at 100/unit prints `100`, 6350 prints `63.5`.
    pub fn to_major_string(self, minor_per_unit: i64) -> String {
        assert!(minor_per_unit > 0, "minor_per_unit must be positive");
        let neg = self.0 < 0;
        let abs = self.0.unsigned_abs();
        let per = minor_per_unit.unsigned_abs();
        let whole = abs / per;
        let mut frac = abs % per;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&whole.to_string());
        if frac != 0 {
            // enough digits to be exact when per is a power of ten; otherwise
            // fall back to 6 digits, truncated
            let mut digits = String::new();
            let mut guard = 0;
            while frac != 0 && guard < 18 {
                frac *= 10;
                digits.push(char::from(b'0' + (frac / per) as u8));
                frac %= per;
                guard += 1;
            }
            out.push('.');
            out.push_str(digits.trim_end_matches('0'));
        }
        out
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Mul<u64> for Money {
    type Output = Money;
    fn mul(self, rhs: u64) -> Money {
        self.checked_mul_count(rhs).expect("money overflow")
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}
