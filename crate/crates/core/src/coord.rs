//! Exact coordinates.
//!
//! Every coordinate and bus height is an exact rational. Input numbers are
//! parsed from their decimal text, and solvers only ever add decimal offsets,
//! so everything printed back out is a terminating decimal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coord(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a decimal number: {0:?}")]
pub struct ParseCoordError(pub String);

impl Coord {
    pub const ZERO: Coord = Coord(Ratio::new_raw(0, 1));
    pub const ONE: Coord = Coord(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Self {
        Coord(Ratio::new(numer, denom))
    }

    pub fn from_int(v: i64) -> Self {
        Coord(Ratio::from_integer(v as i128))
    }

    pub fn ratio(self) -> Ratio<i128> {
        self.0
    }

    pub fn numer(self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(self) -> i128 {
        *self.0.denom()
    }

    pub fn abs(self) -> Self {
        Coord(self.0.abs())
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// The decimal text is exact when the reduced denominator only has the
    /// prime factors 2 and 5.
    pub fn is_terminating(self) -> bool {
        let mut d = self.denom();
        while d % 2 == 0 {
            d /= 2;
        }
        while d % 5 == 0 {
            d /= 5;
        }
        d == 1
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Midpoint of two coordinates.
    pub fn midpoint(self, other: Self) -> Self {
        (self + other) / Coord::from_int(2)
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coord {
    /// Shortest exact decimal. Non-terminating values (which no solver in this
    /// crate produces) are rounded to 20 fractional digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = self.numer();
        let denom = self.denom();
        if denom == 1 {
            return write!(f, "{numer}");
        }
        let negative = numer < 0;
        let mut rem = numer.unsigned_abs();
        let denom = denom as u128;
        let int_part = rem / denom;
        rem %= denom;
        let mut digits = String::new();
        let limit = if self.is_terminating() { usize::MAX } else { 20 };
        while rem != 0 && digits.len() < limit {
            rem *= 10;
            digits.push(char::from(b'0' + (rem / denom) as u8));
            rem %= denom;
        }
        let digits = digits.trim_end_matches('0');
        if negative {
            f.write_str("-")?;
        }
        if digits.is_empty() {
            write!(f, "{int_part}")
        } else {
            write!(f, "{int_part}.{digits}")
        }
    }
}

impl FromStr for Coord {
    type Err = ParseCoordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCoordError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (negative, mantissa) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_digits, frac_digits) = match mantissa.split_once('.') {
            Some((a, b)) => (a, b),
            None => (mantissa, ""),
        };
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(err());
        }
        if !int_digits.bytes().chain(frac_digits.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let mut numer: i128 = 0;
        for b in int_digits.bytes().chain(frac_digits.bytes()) {
            numer = numer.checked_mul(10).and_then(|v| v.checked_add((b - b'0') as i128)).ok_or_else(err)?;
        }
        let scale = exponent - frac_digits.len() as i32;
        let pow = 10i128.checked_pow(scale.unsigned_abs()).ok_or_else(err)?;
        let value = if scale >= 0 {
            Ratio::from_integer(numer.checked_mul(pow).ok_or_else(err)?)
        } else {
            Ratio::new(numer, pow)
        };
        Ok(Coord(if negative { -value } else { value }))
    }
}

impl From<i64> for Coord {
    fn from(v: i64) -> Self {
        Coord::from_int(v)
    }
}

impl From<i32> for Coord {
    fn from(v: i32) -> Self {
        Coord::from_int(v as i64)
    }
}

impl From<Ratio<i128>> for Coord {
    fn from(r: Ratio<i128>) -> Self {
        Coord(r)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Coord {
            type Output = Coord;
            fn $m(self, rhs: Coord) -> Coord {
                Coord(self.0.$m(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        Coord(-self.0)
    }
}

impl std::iter::Sum for Coord {
    fn sum<I: Iterator<Item = Coord>>(iter: I) -> Coord {
        iter.fold(Coord::ZERO, |a, b| a + b)
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let number: serde_json::Number = self.to_string().parse().map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let number = serde_json::Number::deserialize(deserializer)?;
        number.as_str().parse().map_err(serde::de::Error::custom)
    }
}

/// Smallest power of ten (at least 10) that is `>= n`. Dividing by it keeps
/// decimal input decimal.
pub fn decimal_at_least(n: usize) -> i128 {
    let mut denom: i128 = 10;
    while denom < n as i128 {
        denom *= 10;
    }
    denom
}

/// Least common multiple of the denominators, used to scale a set of
/// coordinates onto the integers.
pub fn common_denominator<I: IntoIterator<Item = Coord>>(values: I) -> i128 {
    values.into_iter().fold(1i128, |acc, v| acc.lcm(&v.denom()))
}

impl PartialEq<i64> for Coord {
    fn eq(&self, other: &i64) -> bool {
        *self == Coord::from_int(*other)
    }
}

impl PartialOrd<i64> for Coord {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Coord::from_int(*other)))
    }
}
