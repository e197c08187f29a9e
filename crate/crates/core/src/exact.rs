//! Exact rational helpers shared by every module that reports probabilities
//! or costs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Nearest integer, exact halves going to the even neighbour.
pub fn round_half_even(x: &Q) -> BigInt {
    let floor = x.floor().to_integer();
    let frac = x - Q::from_integer(floor.clone());
    let half = Q::new(BigInt::one(), BigInt::from(2));
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

/// Same rounding rule on an integer quotient `num / den` with `den > 0`.
pub fn round_half_even_i128(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let floor = num.div_euclid(den);
    let rem2 = 2 * num.rem_euclid(den);
    if rem2 < den {
        floor
    } else if rem2 > den {
        floor + 1
    } else if floor % 2 == 0 {
        floor
    } else {
        floor + 1
    }
}

/// True when `x` lies exactly halfway between two integers.
pub fn is_half_integer(x: &Q) -> bool {
    let doubled = x * qi(2);
    doubled.is_integer() && !x.is_integer()
}

pub fn fmt_fraction(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering rounded to 12 fractional digits, trailing zeros trimmed.
pub fn fmt_decimal(x: &Q) -> String {
    const DIGITS: u32 = 12;
    let scale = BigInt::from(10u64.pow(DIGITS));
    let scaled = round_half_even(&(x * Q::from_integer(scale.clone())));
    let negative = scaled.is_negative();
    let (int_part, frac_part) = scaled.abs().div_rem(&scale);
    let mut frac = format!("{:0width$}", frac_part, width = DIGITS as usize);
    while frac.ends_with('0') {
        frac.pop();
    }
    let sign = if negative { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"7/2"`, `"-3"`, or a finite decimal such as `"3.5"` exactly.
pub fn parse_rational(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        let v = Q::new(n, d);
        return Ok(if negative { -v } else { v });
    }
    BigInt::from_str(s).map(Q::from_integer).map_err(|_| bad())
}

/// A rational that serializes as `{"exact": "7/2", "decimal": "3.5"}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub Q);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Exact", 2)?;
        st.serialize_field("exact", &fmt_fraction(&self.0))?;
        st.serialize_field("decimal", &fmt_decimal(&self.0))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            exact: String,
        }
        let raw = Raw::deserialize(d)?;
        parse_rational(&raw.exact).map(Exact).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_fraction(&self.0))
    }
}

/// Serde adapter storing a rational as a fraction string.
pub mod fraction {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_fraction(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of the denominators, as an `i128`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> Option<i128> {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(v.denom());
    }
    l.to_i128()
}

/// `x * scale` as an `i128`, `None` if it is not integral or overflows.
pub fn scaled_i128(x: &Q, scale: i128) -> Option<i128> {
    let v = x * Q::from_integer(BigInt::from(scale));
    if v.is_integer() {
        v.to_integer().to_i128()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_breaks_ties_to_even() {
        assert_eq!(round_half_even(&q(5, 2)), BigInt::from(2));
        assert_eq!(round_half_even(&q(7, 2)), BigInt::from(4));
        assert_eq!(round_half_even(&q(-5, 2)), BigInt::from(-2));
        assert_eq!(round_half_even(&q(31, 10)), BigInt::from(3));
        assert_eq!(round_half_even(&q(-29, 10)), BigInt::from(-3));
        for (n, d) in [(5, 2), (7, 2), (-5, 2), (-7, 2), (31, 10), (-29, 10), (0, 1), (9, 4)] {
            assert_eq!(
                BigInt::from(round_half_even_i128(n, d)),
                round_half_even(&q(n as i64, d as i64))
            );
        }
    }

    #[test]
    fn renders_fractions_and_decimals() {
        assert_eq!(fmt_fraction(&q(7, 2)), "7/2");
        assert_eq!(fmt_decimal(&q(7, 2)), "3.5");
        assert_eq!(fmt_fraction(&q(440, 3)), "440/3");
        assert_eq!(fmt_decimal(&q(440, 3)), "146.666666666667");
        assert_eq!(fmt_decimal(&q(-1, 8)), "-0.125");
        assert_eq!(fmt_decimal(&qi(16)), "16");
    }

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("7/2").unwrap(), q(7, 2));
        assert_eq!(parse_rational("3.5").unwrap(), q(7, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("100").unwrap(), qi(100));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }
}
