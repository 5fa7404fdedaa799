//! Scaled-point arithmetic with TeX's rounding and truncation rules.
//!
//! Every length in the layout is an [`Sp`]: an integer count of scaled
//! points, 65536 to the printer's point. Decimal constants are read the way
//! TeX reads them (the fraction is rounded to the nearest 2^-16), `\divide`
//! truncates toward zero, and `<factor><dimen>` products truncate toward
//! zero as well.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scaled points per printer's point.
pub const UNITY: i64 = 65536;

/// Largest magnitude a dimension may hold (TeX's `\maxdimen`).
pub const MAX_DIMEN: i64 = (1 << 30) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("arithmetic overflow: {0} sp is outside the dimension range")]
    Overflow(i64),
    #[error("division by zero")]
    DivideByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("missing number")]
    Missing,
    #[error("number too big: {0}")]
    TooBig(String),
    #[error("illegal unit in `{0}` (expected `pt`, `sp` or no unit)")]
    BadUnit(String),
    #[error("malformed number `{0}`")]
    Malformed(String),
}

/// A dimension in scaled points.
///
/// `+` and `-` operate on the underlying `i64` and cannot wrap for values in
/// range; the multiplicative operations and [`Sp::checked`] enforce the
/// `±MAX_DIMEN` range.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sp(i64);

impl Sp {
    pub const ZERO: Sp = Sp(0);

    /// `n` printer's points.
    pub const fn pt(n: i64) -> Sp {
        Sp(n * UNITY)
    }

    pub const fn from_raw(raw: i64) -> Sp {
        Sp(raw)
    }

    pub fn new(raw: i64) -> Result<Sp, ArithError> {
        Sp(raw).checked()
    }

    pub const fn raw(self) -> i64 {
        self.0
    }

    pub fn checked(self) -> Result<Sp, ArithError> {
        if self.0.abs() > MAX_DIMEN {
            Err(ArithError::Overflow(self.0))
        } else {
            Ok(self)
        }
    }

    pub fn abs(self) -> Sp {
        Sp(self.0.abs())
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `\multiply`: exact integer product.
    pub fn mul_int(self, n: i64) -> Result<Sp, ArithError> {
        self.checked()?;
        let p = self.0.checked_mul(n).ok_or(ArithError::Overflow(i64::MAX))?;
        Sp(p).checked()
    }

    /// `\divide`: quotient truncated toward zero.
    pub fn div_int(self, n: i64) -> Result<Sp, ArithError> {
        if n == 0 {
            return Err(ArithError::DivideByZero);
        }
        self.checked()?;
        Ok(Sp(self.0 / n))
    }

    /// `<factor><dimen>`: `trunc(x * f / 65536)` with the sign of `x * f`.
    pub fn scale(self, f: Factor) -> Result<Sp, ArithError> {
        self.checked()?;
        let p = (self.0 as i128) * (f.0 as i128) / (UNITY as i128);
        let p = i64::try_from(p).map_err(|_| ArithError::Overflow(i64::MAX))?;
        Sp(p).checked()
    }

    /// Multiply by `n`, then divide by `d` (truncating), with a 64-bit
    /// intermediate. Callers that need TeX's divide-then-multiply order must
    /// compose [`Sp::div_int`] and [`Sp::mul_int`] themselves.
    pub fn muldiv(self, n: i64, d: i64) -> Result<Sp, ArithError> {
        if d == 0 {
            return Err(ArithError::DivideByZero);
        }
        self.checked()?;
        let p = self.0.checked_mul(n).ok_or(ArithError::Overflow(i64::MAX))?;
        Sp(p / d).checked()
    }

    /// `\divide\x\tw@`.
    pub fn half(self) -> Sp {
        Sp(self.0 / 2)
    }

    pub fn max(self, other: Sp) -> Sp {
        Sp(self.0.max(other.0))
    }

    pub fn min(self, other: Sp) -> Sp {
        Sp(self.0.min(other.0))
    }

    /// Reads `<decimal>pt`, `<decimal>` (points) or `<integer>sp`.
    pub fn parse_dimen(s: &str) -> Result<Sp, NumberError> {
        let t = s.trim();
        if let Some(num) = t.strip_suffix("sp") {
            let v: i64 = num.trim().parse().map_err(|_| NumberError::Malformed(s.to_string()))?;
            if v.abs() > MAX_DIMEN {
                return Err(NumberError::TooBig(s.to_string()));
            }
            return Ok(Sp(v));
        }
        let num = t.strip_suffix("pt").unwrap_or(t).trim();
        if num.chars().any(|c| c.is_ascii_alphabetic()) {
            return Err(NumberError::BadUnit(s.to_string()));
        }
        let raw = scan_decimal(num)?;
        if raw.abs() > MAX_DIMEN {
            return Err(NumberError::TooBig(s.to_string()));
        }
        Ok(Sp(raw))
    }

    /// Exact decimal points rounded to at most five places, trailing zeros
    /// trimmed. Used only when serializing.
    pub fn to_pt_string(self) -> String {
        let neg = self.0 < 0;
        let a = self.0.unsigned_abs() as u128;
        let q = (a * 200_000 + UNITY as u128) / (2 * UNITY as u128);
        let int = q / 100_000;
        let frac = q % 100_000;
        let mut out = String::new();
        if neg && q != 0 {
            out.push('-');
        }
        out.push_str(&int.to_string());
        if frac != 0 {
            let digits = format!("{frac:05}");
            out.push('.');
            out.push_str(digits.trim_end_matches('0'));
        }
        out
    }
}

impl Add for Sp {
    type Output = Sp;
    fn add(self, rhs: Sp) -> Sp {
        Sp(self.0 + rhs.0)
    }
}

impl Sub for Sp {
    type Output = Sp;
    fn sub(self, rhs: Sp) -> Sp {
        Sp(self.0 - rhs.0)
    }
}

impl Neg for Sp {
    type Output = Sp;
    fn neg(self) -> Sp {
        Sp(-self.0)
    }
}

impl AddAssign for Sp {
    fn add_assign(&mut self, rhs: Sp) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Sp {
    fn sub_assign(&mut self, rhs: Sp) {
        self.0 -= rhs.0;
    }
}

impl std::iter::Sum for Sp {
    fn sum<I: Iterator<Item = Sp>>(iter: I) -> Sp {
        Sp(iter.map(|s| s.0).sum())
    }
}

impl fmt::Display for Sp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pt", print_scaled(self.0))
    }
}

/// A signed 16.16 scale factor, as in `1.5\standardcgap`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Factor(i64);

impl Factor {
    pub const ONE: Factor = Factor(UNITY);
    pub const ZERO: Factor = Factor(0);

    pub const fn from_raw(raw: i64) -> Factor {
        Factor(raw)
    }

    pub const fn raw(self) -> i64 {
        self.0
    }

    pub const fn from_int(n: i64) -> Factor {
        Factor(n * UNITY)
    }
}

impl FromStr for Factor {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Factor, NumberError> {
        scan_decimal(s.trim()).map(Factor)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_scaled(self.0))
    }
}

/// TeX's `round_decimals`: the fraction `0.d1d2...dk` rounded to the
/// nearest multiple of 2^-16.
fn round_decimals(digits: &[u8]) -> i64 {
    let mut a: i64 = 0;
    for &d in digits.iter().take(17).rev() {
        a = (a + (d as i64) * 131_072) / 10;
    }
    (a + 1) / 2
}

/// Scans `[+-]*<digits>[.<digits>]` into a signed 16.16 value.
fn scan_decimal(s: &str) -> Result<i64, NumberError> {
    let mut rest = s;
    let mut negative = false;
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix('-') {
            negative = !negative;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else {
            break;
        }
    }
    if rest.is_empty() {
        return Err(NumberError::Missing);
    }
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(NumberError::Malformed(s.to_string()));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NumberError::Malformed(s.to_string()));
    }
    let mut int: i64 = 0;
    for b in int_part.bytes() {
        int = int * 10 + (b - b'0') as i64;
        if int >= 16384 {
            return Err(NumberError::TooBig(s.to_string()));
        }
    }
    let digits: Vec<u8> = frac_part.bytes().map(|b| b - b'0').collect();
    let mut frac = round_decimals(&digits);
    if frac >= UNITY {
        int += 1;
        frac -= UNITY;
        if int >= 16384 {
            return Err(NumberError::TooBig(s.to_string()));
        }
    }
    let raw = int * UNITY + frac;
    Ok(if negative { -raw } else { raw })
}

/// TeX's `print_scaled`: the shortest decimal that scans back to the same
/// 16.16 value.
pub fn print_scaled(raw: i64) -> String {
    let mut out = String::new();
    let mut s = raw;
    if s < 0 {
        out.push('-');
        s = -s;
    }
    out.push_str(&(s / UNITY).to_string());
    out.push('.');
    s = 10 * (s % UNITY) + 5;
    let mut delta = 10;
    loop {
        if delta > UNITY {
            s += 0x8000 - 50000;
        }
        out.push(char::from(b'0' + (s / UNITY) as u8));
        s = 10 * (s % UNITY);
        delta *= 10;
        if s <= delta {
            break;
        }
    }
    out
}

/// Position of the `num`-th of `den` equal glue shares of `total`, rounded
/// half away from zero the way TeX rounds set glue.
pub fn glue_share(total: Sp, num: i64, den: i64) -> Sp {
    debug_assert!(den > 0);
    let p = total.0 as i128 * num as i128;
    let d = den as i128;
    let q = if p >= 0 {
        (2 * p + d) / (2 * d)
    } else {
        -((-2 * p + d) / (2 * d))
    };
    Sp(q as i64)
}
