//! Exact dyadic arithmetic for the square-wave shattering construction.
//!
//! Points `x_i = 2^i e_1` for `i = 1..=m`; the weight vector has first
//! coordinate `cos(theta) = sum_i y_i 2^-i`, so `w . x_i = 2^i cos(theta)`
//! and its floor has parity `y_i`. The angle itself is never computed.

use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::rational::Q;
use crate::{Error, Result};

/// Largest `m` whose numerators fit the exact integer width.
pub const MAX_LABELS: usize = 62;

/// `num / 2^exp`, kept with odd numerator or zero exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: i128,
    exp: u32,
}

impl DyadicRational {
    pub fn new(num: i128, exp: u32) -> Self {
        let shift = if num == 0 {
            exp
        } else {
            num.trailing_zeros().min(exp)
        };
        Self {
            num: num >> shift,
            exp: exp - shift,
        }
    }

    pub fn from_int(v: i128) -> Self {
        Self { num: v, exp: 0 }
    }

    pub fn numerator(self) -> i128 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    /// Multiplication by `2^k`, exact.
    pub fn mul_pow2(self, k: u32) -> Result<Self> {
        if k <= self.exp {
            return Ok(Self::new(self.num, self.exp - k));
        }
        let up = k - self.exp;
        let factor = (up < 127).then(|| 1i128 << up);
        factor
            .and_then(|f| self.num.checked_mul(f))
            .map(Self::from_int)
            .ok_or_else(|| Error::Parameter(format!("2^{k} * {self} overflows")))
    }

    pub fn floor(self) -> i128 {
        self.num >> self.exp
    }

    pub fn to_rational(self) -> Q {
        Q::new(BigInt::from(self.num), BigInt::from(1) << self.exp)
    }
}

impl fmt::Display for DyadicRational {
    /// Exact decimal expansion.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            return write!(f, "{}", self.num);
        }
        let sign = if self.num < 0 { "-" } else { "" };
        let abs = BigInt::from(self.num.unsigned_abs());
        let scaled = abs * num_traits::pow(BigInt::from(5), self.exp as usize);
        let digits = format!("{:0>width$}", scaled.to_string(), width = self.exp as usize + 1);
        let (int, frac) = digits.split_at(digits.len() - self.exp as usize);
        write!(f, "{sign}{int}.{frac}")
    }
}

/// 1 iff `floor(u)` is odd.
pub fn square_wave(u: DyadicRational) -> bool {
    u.floor().rem_euclid(2) == 1
}

fn check_len(m: usize) -> Result<()> {
    if m == 0 || m > MAX_LABELS {
        return Err(Error::Parameter(format!(
            "need 1 <= m <= {MAX_LABELS} labels, got {m}"
        )));
    }
    Ok(())
}

/// `cos(theta) = sum_i y_i 2^-i`.
pub fn shattering_weight(labels: &[bool]) -> Result<DyadicRational> {
    let m = labels.len();
    check_len(m)?;
    let num = labels
        .iter()
        .fold(0i128, |acc, &y| (acc << 1) | i128::from(y));
    Ok(DyadicRational::new(num, m as u32))
}

/// The dot products `w . x_i = 2^i cos(theta)`, `i = 1..=m`.
pub fn dot_products(labels: &[bool]) -> Result<Vec<DyadicRational>> {
    let c = shattering_weight(labels)?;
    (1..=labels.len() as u32).map(|i| c.mul_pow2(i)).collect()
}

/// True iff the square wave reproduces every label.
pub fn verify_shatter(labels: &[bool]) -> Result<bool> {
    Ok(dot_products(labels)?
        .into_iter()
        .zip(labels)
        .all(|(u, &y)| square_wave(u) == y))
}

/// Labels from a 0/1 string such as `"101"`.
pub fn parse_labels(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("label string '{s}' must contain only 0 and 1"))),
        })
        .collect()
}

/// Labels of labeling number `index`, first label in the most significant bit.
pub fn labels_of(index: u64, m: usize) -> Vec<bool> {
    (0..m).map(|i| index >> (m - 1 - i) & 1 == 1).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShatterSummary {
    pub m: usize,
    pub labelings: u64,
    pub verified: u64,
    /// Smallest failing labeling, if any.
    pub first_failure: Option<String>,
}

/// Largest `m` accepted by [`verify_all`].
pub const MAX_EXHAUSTIVE: usize = 30;

/// Checks all `2^m` labelings in parallel.
pub fn verify_all(m: usize) -> Result<ShatterSummary> {
    check_len(m)?;
    if m > MAX_EXHAUSTIVE {
        return Err(Error::SizeCap {
            what: "exhaustive labelings m",
            size: m,
            cap: MAX_EXHAUSTIVE,
            hint: "; check individual labelings with --labels",
        });
    }
    let total = 1u64 << m;
    let failures: Vec<u64> = (0..total)
        .into_par_iter()
        .filter(|&i| !verify_shatter(&labels_of(i, m)).unwrap_or(false))
        .collect();
    let render = |i: u64| labels_of(i, m).iter().map(|&b| if b { '1' } else { '0' }).collect();
    Ok(ShatterSummary {
        m,
        labelings: total,
        verified: total - failures.len() as u64,
        first_failure: failures.iter().min().map(|&i| render(i)),
    })
}
