// SPDX-License-Identifier: Apache-2.0

//! Integer picosecond time base.
//!
//! Every delay and timestamp is held as a whole number of picoseconds so that
//! path sums such as 0.250 ns and 0.313 ns compare exactly. Text formats use
//! decimal nanoseconds with at most three fractional digits.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use thiserror::Error;

/// A time or delay in picoseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ps(pub u64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TimeParseError {
    #[error("`{0}` is not a decimal nanosecond value")]
    Malformed(String),
    #[error("`{0}` is negative")]
    Negative(String),
    #[error("`{0}` is finer than 1 ps resolution")]
    TooPrecise(String),
}

impl Ps {
    pub const ZERO: Ps = Ps(0);

    pub fn from_ns_f64(ns: f64) -> Result<Ps, TimeParseError> {
        if !ns.is_finite() {
            return Err(TimeParseError::Malformed(ns.to_string()));
        }
        if ns < 0.0 {
            return Err(TimeParseError::Negative(ns.to_string()));
        }
        let ps = ns * 1000.0;
        let rounded = ps.round();
        if (ps - rounded).abs() > 1e-6 {
            return Err(TimeParseError::TooPrecise(ns.to_string()));
        }
        Ok(Ps(rounded as u64))
    }

    pub fn as_ns_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn saturating_sub(self, rhs: Ps) -> Ps {
        Ps(self.0.saturating_sub(rhs.0))
    }
}

impl FromStr for Ps {
    type Err = TimeParseError;

    /// Parses decimal nanoseconds (`0.063`, `2`, `.25`) exactly.
    fn from_str(s: &str) -> Result<Ps, TimeParseError> {
        let text = s.trim();
        let malformed = || TimeParseError::Malformed(s.to_string());
        if text.starts_with('-') {
            return Err(TimeParseError::Negative(s.to_string()));
        }
        let text = text.strip_prefix('+').unwrap_or(text);
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(malformed());
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) {
            return Err(malformed());
        }
        let whole: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| malformed())?
        };
        let frac = frac_part.trim_end_matches('0');
        if frac.len() > 3 {
            return Err(TimeParseError::TooPrecise(s.to_string()));
        }
        let mut frac_ps = 0u64;
        for (i, b) in frac.bytes().enumerate() {
            frac_ps += u64::from(b - b'0') * 10u64.pow(2 - i as u32);
        }
        whole
            .checked_mul(1000)
            .and_then(|w| w.checked_add(frac_ps))
            .map(Ps)
            .ok_or_else(malformed)
    }
}

impl fmt::Display for Ps {
    /// Formats as nanoseconds with three decimals, e.g. `0.250`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

impl Add for Ps {
    type Output = Ps;
    fn add(self, rhs: Ps) -> Ps {
        Ps(self.0 + rhs.0)
    }
}

impl AddAssign for Ps {
    fn add_assign(&mut self, rhs: Ps) {
        self.0 += rhs.0;
    }
}

impl Sub for Ps {
    type Output = Ps;
    fn sub(self, rhs: Ps) -> Ps {
        Ps(self.0 - rhs.0)
    }
}

impl Sum for Ps {
    fn sum<I: Iterator<Item = Ps>>(iter: I) -> Ps {
        iter.fold(Ps::ZERO, Add::add)
    }
}

/// Formats a signed picosecond difference as nanoseconds, e.g. `-0.063`.
pub fn fmt_signed_ns(ps: i64) -> String {
    let sign = if ps < 0 { "-" } else { "" };
    let mag = ps.unsigned_abs();
    format!("{sign}{}.{:03}", mag / 1000, mag % 1000)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_ns_exactly() {
        assert_eq!("0.063".parse::<Ps>(), Ok(Ps(63)));
        assert_eq!("0.25".parse::<Ps>(), Ok(Ps(250)));
        assert_eq!("2".parse::<Ps>(), Ok(Ps(2000)));
        assert_eq!(".1".parse::<Ps>(), Ok(Ps(100)));
        assert_eq!("0.0500".parse::<Ps>(), Ok(Ps(50)));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!("-1".parse::<Ps>(), Err(TimeParseError::Negative(_))));
        assert!(matches!("0.0625".parse::<Ps>(), Err(TimeParseError::TooPrecise(_))));
        assert!(matches!("abc".parse::<Ps>(), Err(TimeParseError::Malformed(_))));
        assert!(matches!(".".parse::<Ps>(), Err(TimeParseError::Malformed(_))));
        assert!(matches!("1e3".parse::<Ps>(), Err(TimeParseError::Malformed(_))));
    }

    #[test]
    fn display_round_trips() {
        for ps in [0, 1, 63, 250, 313, 2203, 29_200] {
            let text = Ps(ps).to_string();
            assert_eq!(text.parse::<Ps>(), Ok(Ps(ps)));
        }
        assert_eq!(Ps(63).to_string(), "0.063");
        assert_eq!(fmt_signed_ns(-63), "-0.063");
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(Ps::from_ns_f64(0.063), Ok(Ps(63)));
        assert!(Ps::from_ns_f64(0.0005).is_err());
    }
}
