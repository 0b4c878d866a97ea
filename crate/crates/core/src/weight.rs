//! Distance-decay weights for splitting mint profit.

use num_rational::Ratio;

use crate::params::WeightFn;

/// Exact weight of a coin at rating `w` when a coin of rating `j` is minted.
///
/// Both variants are strictly decreasing in `|w - j|`.
pub fn weight(kind: WeightFn, w: u8, j: u8) -> Ratio<i128> {
    let distance = (w as i128 - j as i128).abs();
    match kind {
        WeightFn::F1 => Ratio::new(1, 1i128 << (distance + 1)),
        WeightFn::F2 => Ratio::new(1, 2 + distance),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluated_values() {
        assert_eq!(weight(WeightFn::F1, 4, 5), Ratio::new(1, 4));
        assert_eq!(weight(WeightFn::F1, 5, 5), Ratio::new(1, 2));
        assert_eq!(weight(WeightFn::F2, 3, 5), Ratio::new(1, 4));
        assert_eq!(weight(WeightFn::F2, 5, 5), Ratio::new(1, 2));
        assert_eq!(weight(WeightFn::F1, 1, 9), Ratio::new(1, 512));
    }

    #[test]
    fn symmetric_and_strictly_decreasing() {
        for kind in [WeightFn::F1, WeightFn::F2] {
            for j in 1..=9u8 {
                for w in 1..=9u8 {
                    assert_eq!(weight(kind, w, j), weight(kind, j, w));
                    for v in 1..=9u8 {
                        let (dw, dv) = ((w as i8 - j as i8).abs(), (v as i8 - j as i8).abs());
                        if dw < dv {
                            assert!(weight(kind, w, j) > weight(kind, v, j));
                        }
                    }
                }
            }
        }
    }
}
