//! Exact rational helpers shared by every module.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational number used for probabilities and coordinates.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(Error::Parse(format!(
            "'{s}' is not a rational string of the form num/den"
        )));
    }
    let r = Q::from_str(s).map_err(|e| Error::Parse(format!("'{s}': {e}")))?;
    Ok(r)
}

/// Parses a rational string or a plain decimal such as `0.3` exactly.
pub fn parse_decimal(s: &str) -> Result<Q> {
    let t = s.trim();
    if t.contains('/') || !t.contains('.') {
        return parse_rational(t);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("'{s}' is not a decimal number")));
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|e| Error::Parse(e.to_string()))?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Q::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Canonical `num/den` rendering; integers keep the `/1`.
pub fn format_rational(r: &Q) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Q) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ToPrimitive gives up on huge numerators; scale down by hand.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational from an `f64`, for turning computed quantities into atoms.
pub fn from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::Parameter(format!("{x} is not finite")))
}

pub fn in_unit_interval(r: &Q) -> bool {
    !r.is_negative() && *r <= Q::one()
}

pub fn is_probability_sum(total: &Q) -> bool {
    total.is_one()
}

/// Serializes through `Display`, for big integers in JSON reports.
pub fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `#[serde(with)]` adapters writing rationals as `"num/den"` strings and
/// reading either rational or decimal strings.
pub mod serde_q {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_decimal, Q};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_decimal(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| parse_decimal(s).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(
                v.iter()
                    .map(|row| row.iter().map(format_rational).collect::<Vec<_>>()),
            )
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
            Vec::<Vec<String>>::deserialize(d)?
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| parse_decimal(s).map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_strings() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("7").unwrap(), qi(7));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_decimal("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_decimal("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_decimal(".5").unwrap(), q(1, 2));
        assert_eq!(parse_decimal("2/8").unwrap(), q(1, 4));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal(".").is_err());
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&qi(1)), "1/1");
        assert_eq!(format_rational(&q(-2, 4)), "-1/2");
    }
}
