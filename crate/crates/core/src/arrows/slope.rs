//! The 23 admissible slopes and the quantizer that picks one.

use serde::{Deserialize, Serialize};

use super::ArrowError;
use crate::fixedpoint::{ArithError, Sp};

/// One admissible slope `rise/run`; `index` runs from 1 (1/6) to 23 (6/1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlopeEntry {
    pub index: u8,
    pub rise: i64,
    pub run: i64,
}

const fn e(rise: i64, run: i64, index: u8) -> SlopeEntry {
    SlopeEntry { index, rise, run }
}

pub const SLOPES: [SlopeEntry; 23] = [
    e(1, 6, 1),
    e(1, 5, 2),
    e(1, 4, 3),
    e(1, 3, 4),
    e(2, 5, 5),
    e(1, 2, 6),
    e(3, 5, 7),
    e(2, 3, 8),
    e(3, 4, 9),
    e(4, 5, 10),
    e(5, 6, 11),
    e(1, 1, 12),
    e(6, 5, 13),
    e(5, 4, 14),
    e(4, 3, 15),
    e(3, 2, 16),
    e(5, 3, 17),
    e(2, 1, 18),
    e(5, 2, 19),
    e(3, 1, 20),
    e(4, 1, 21),
    e(5, 1, 22),
    e(6, 1, 23),
];

pub const SHALLOWEST: SlopeEntry = SLOPES[0];
pub const STEEPEST: SlopeEntry = SLOPES[22];

pub fn slope_for_index(i: i64) -> Result<SlopeEntry, ArrowError> {
    if (1..=23).contains(&i) {
        Ok(SLOPES[i as usize - 1])
    } else {
        Err(ArrowError::SlopeIndex(i))
    }
}

/// Index after a `bend` adjustment, clamped to the table.
pub fn bend_index(index: u8, bend: i64, nesw: bool) -> u8 {
    let delta = if nesw { bend } else { bend.saturating_neg() };
    (index as i64).saturating_add(delta).clamp(1, 23) as u8
}

/// Picks the table slope for a rise `dy` over a run `dx`, both already
/// oriented so that the arrow's own direction is positive.
///
/// Between two neighbouring entries the lower one wins only when `dy/dx`
/// lies strictly below the mean of their tangents.
pub fn quantize_slope(dy: Sp, dx: Sp) -> Result<SlopeEntry, ArrowError> {
    let (dy, dx) = (dy.raw() as i128, dx.raw() as i128);
    if dy == 0 && dx == 0 {
        return Err(ArrowError::Degenerate);
    }
    if dx < 0 {
        return Ok(STEEPEST);
    }
    if 6 * dy < dx {
        return Ok(SHALLOWEST);
    }
    if 6 * dx < dy {
        return Ok(STEEPEST);
    }
    let mut lower = (0i128, 1i128);
    for (k, s) in SLOPES.iter().enumerate() {
        let (t1, t2) = (s.rise as i128, s.run as i128);
        if dx * t1 < dy * t2 {
            lower = (t1, t2);
            continue;
        }
        let (l1, l2) = lower;
        if 2 * dy * t2 * l2 < dx * (t1 * l2 + l1 * t2) {
            return Ok(SLOPES[k - 1]);
        }
        return Ok(*s);
    }
    Ok(STEEPEST)
}

/// A displacement along a quantized line: `run` horizontal, `rise`
/// vertical, in the ratio `run : rise = t2 : t1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineStep {
    pub run: Sp,
    pub rise: Sp,
}

/// Splits a length `d` into line components using the macro's 0.9/0.8/0.7
/// approximation of the cosine.
pub fn getcos(d: Sp, s: SlopeEntry) -> Result<LineStep, ArithError> {
    let f = |c: u8| {
        if c < 8 {
            9
        } else if c < 12 {
            8
        } else {
            7
        }
    };
    if s.rise < s.run {
        let run = d.muldiv(f(s.index), 10)?;
        let rise = run.muldiv(s.rise, s.run)?;
        Ok(LineStep { run, rise })
    } else {
        let rise = d.muldiv(f(24 - s.index), 10)?;
        let run = rise.muldiv(s.run, s.rise)?;
        Ok(LineStep { run, rise })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(dy: i64, dx: i64) -> u8 {
        quantize_slope(Sp::pt(dy), Sp::pt(dx)).unwrap().index
    }

    #[test]
    fn table_is_strictly_increasing() {
        for w in SLOPES.windows(2) {
            assert!(w[0].rise * w[1].run < w[1].rise * w[0].run);
            assert_eq!(w[0].index + 1, w[1].index);
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(slope_for_index(12).unwrap(), e(1, 1, 12));
        assert_eq!(slope_for_index(1).unwrap(), e(1, 6, 1));
        assert_eq!(slope_for_index(23).unwrap(), e(6, 1, 23));
        assert!(slope_for_index(0).is_err());
        assert!(slope_for_index(24).is_err());
    }

    #[test]
    fn quantizer_examples() {
        assert_eq!(q(1, 1), 12);
        assert_eq!(q(1, 7), 1);
        assert_eq!(q(7, 6), 13);
        assert_eq!(q(0, 5), 1);
        assert_eq!(q(5, 0), 23);
        assert_eq!(q(1, -1), 23);
        assert_eq!(q(-1, 5), 1);
        assert_eq!(q(1, 6), 1);
        assert_eq!(q(6, 1), 23);
        assert_eq!(quantize_slope(Sp::ZERO, Sp::ZERO), Err(ArrowError::Degenerate));
    }

    #[test]
    fn ties_go_up() {
        // 11/10 is the mean of 1/1 and 6/5
        assert_eq!(q(11, 10), 13);
        assert_eq!(
            quantize_slope(Sp::from_raw(10999), Sp::from_raw(10000)).unwrap().index,
            12
        );
    }

    #[test]
    fn bend_clamps() {
        assert_eq!(bend_index(12, 30, true), 23);
        assert_eq!(bend_index(12, 30, false), 1);
        assert_eq!(bend_index(12, -3, true), 9);
        assert_eq!(bend_index(5, 0, false), 5);
        assert_eq!(bend_index(5, i64::MIN, false), 23);
    }

    #[test]
    fn getcos_examples() {
        let s1 = slope_for_index(1).unwrap();
        assert_eq!(
            getcos(Sp::pt(10), s1).unwrap(),
            LineStep {
                run: Sp::pt(9),
                rise: Sp::from_raw(98304)
            }
        );
        let s12 = slope_for_index(12).unwrap();
        assert_eq!(
            getcos(Sp::pt(10), s12).unwrap(),
            LineStep {
                run: Sp::pt(7),
                rise: Sp::pt(7)
            }
        );
        for s in SLOPES {
            assert_eq!(
                getcos(Sp::ZERO, s).unwrap(),
                LineStep {
                    run: Sp::ZERO,
                    rise: Sp::ZERO
                }
            );
        }
        let s23 = slope_for_index(23).unwrap();
        assert_eq!(
            getcos(Sp::pt(10), s23).unwrap(),
            LineStep {
                run: Sp::from_raw(98304),
                rise: Sp::pt(9)
            }
        );
    }

    proptest! {
        #[test]
        fn index_is_monotone_in_dy(dx in 1i64..(200 << 16), dy in 0i64..(200 << 16), step in 1i64..(20 << 16)) {
            let a = quantize_slope(Sp::from_raw(dy), Sp::from_raw(dx)).unwrap().index;
            let b = quantize_slope(Sp::from_raw(dy + step), Sp::from_raw(dx)).unwrap().index;
            prop_assert!(a <= b);
        }

        #[test]
        fn always_in_range(dx in -(1i64 << 30)..(1 << 30), dy in -(1i64 << 30)..(1 << 30)) {
            prop_assume!(dx != 0 || dy != 0);
            let s = quantize_slope(Sp::from_raw(dy), Sp::from_raw(dx)).unwrap();
            prop_assert!((1..=23).contains(&s.index));
        }

        #[test]
        fn bend_stays_in_range(i in 1u8..=23, bend in any::<i64>(), nesw in any::<bool>()) {
            prop_assert!((1..=23).contains(&bend_index(i, bend, nesw)));
        }
    }
}
