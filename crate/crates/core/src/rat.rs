//! Exact rational index coordinates.
//!
//! Index sets are stored as exact rationals so strict-increase and
//! box-membership tests never suffer floating error. Family values stay in
//! double precision; only the index coordinates are exact.

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = Rational64;

/// A point of a k-parameter index set.
pub type GridPoint = Vec<Rat>;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Parses an exact rational from `"3"`, `"-2.125"` or `"7/4"`.
///
/// Decimal strings are read digit-exactly (no float round trip).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::RationalParse(s.to_string()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::RationalParse(s.to_string()))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::RationalParse(s.to_string()))?;
        if d == 0 {
            return Err(Error::RationalParse(s.to_string()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int: i64 = if int_part == "-" || int_part.is_empty() {
            0
        } else {
            int_part
                .parse()
                .map_err(|_| Error::RationalParse(s.to_string()))?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::RationalParse(s.to_string()));
        }
        if frac_part.len() > 18 {
            return Err(Error::RationalRange(s.to_string()));
        }
        let digits: i64 = frac_part
            .parse()
            .map_err(|_| Error::RationalRange(s.to_string()))?;
        let den = 10i64
            .checked_pow(frac_part.len() as u32)
            .ok_or_else(|| Error::RationalRange(s.to_string()))?;
        let frac = Rat::new(digits, den);
        let whole = Rat::from_integer(int.abs());
        let abs = whole + frac;
        return Ok(if negative || int < 0 { -abs } else { abs });
    }
    let n: i64 = s.parse().map_err(|_| Error::RationalParse(s.to_string()))?;
    Ok(Rat::from_integer(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Renders a rational as an exact token: integer, or `n/d`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom() == &1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `a ≺_s b`: strict increase in every coordinate.
pub fn strictly_below(a: &[Rat], b: &[Rat]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x < y)
}

/// `a ⪯ b`: coordinatewise order.
pub fn below_or_equal(a: &[Rat], b: &[Rat]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Membership in the half-open box `[lo, hi)` (coordinatewise).
pub fn in_box(t: &[Rat], lo: &[Rat], hi: &[Rat]) -> bool {
    t.len() == lo.len()
        && t.iter()
            .zip(lo.iter().zip(hi))
            .all(|(c, (l, h))| l <= c && c < h)
}

/// True when the rational is a nonnegative power of two (1, 2, 4, ...).
pub fn is_power_of_two(r: &Rat) -> bool {
    if r.is_negative() || r.is_zero() {
        return false;
    }
    *r.denom() == 1 && (*r.numer() as u64).is_power_of_two()
}
