//! Closed-form VC-dimension and sample-complexity calculators.
//!
//! Natural logarithms are the default for the union and sparse VC bounds
//! and the sample-complexity bounds; base 2 for the t-combination bound and
//! the two semi-algebraic bounds built on it. Every calculator has
//! a `*_in_base` twin taking the base explicitly. Integer parts (binomials,
//! parameter counts) are exact big integers.

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            Self::Natural => x.ln(),
            Self::Two => x.log2(),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Self::Natural => "ln",
            Self::Two => "log2",
        }
    }
}

fn param(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(msg()))
    }
}

fn open_unit(name: &str, x: f64) -> Result<()> {
    param(x > 0.0 && x < 1.0, || format!("{name} = {x} must lie in (0, 1)"))
}

/// `C d / eps * ln(1 / (delta eps))`.
pub fn blumer_sample_bound(d: f64, epsilon: f64, delta: f64, c: f64) -> Result<f64> {
    blumer_sample_bound_in_base(d, epsilon, delta, c, LogBase::Natural)
}

pub fn blumer_sample_bound_in_base(
    d: f64,
    epsilon: f64,
    delta: f64,
    c: f64,
    base: LogBase,
) -> Result<f64> {
    param(d >= 1.0, || format!("d = {d} must be at least 1"))?;
    param(c > 0.0, || format!("C = {c} must be positive"))?;
    open_unit("epsilon", epsilon)?;
    open_unit("delta", delta)?;
    rate_bound(d, epsilon, delta, c, base)
}

fn rate_bound(numerator: f64, rate: f64, delta: f64, c: f64, base: LogBase) -> Result<f64> {
    let log = base.log(1.0 / (delta * rate));
    param(log > 0.0, || {
        format!("log(1/(delta*rate)) = {log} is not positive")
    })?;
    Ok(c * numerator / rate * log)
}

/// `C d / alpha * ln(1 / (delta alpha))`; `+inf` at `alpha = 0`.
pub fn alpha_sample_bound(d: f64, alpha: f64, delta: f64, c: f64) -> Result<f64> {
    alpha_sample_bound_in_base(d, alpha, delta, c, LogBase::Natural)
}

pub fn alpha_sample_bound_in_base(
    d: f64,
    alpha: f64,
    delta: f64,
    c: f64,
    base: LogBase,
) -> Result<f64> {
    param(d >= 1.0, || format!("d = {d} must be at least 1"))?;
    param(c > 0.0, || format!("C = {c} must be positive"))?;
    open_unit("delta", delta)?;
    param((0.0..=1.0).contains(&alpha), || {
        format!("alpha = {alpha} must lie in [0, 1]")
    })?;
    if alpha == 0.0 {
        return Ok(f64::INFINITY);
    }
    rate_bound(d, alpha, delta, c, base)
}

/// VC-dimension bound for a union of `M` classes of VC-dimension `<= d`:
/// `4d + 10 ln M`.
pub fn union_vc_bound(d: f64, m: f64) -> Result<f64> {
    union_vc_bound_in_base(d, m, LogBase::Natural)
}

pub fn union_vc_bound_in_base(d: f64, m: f64, base: LogBase) -> Result<f64> {
    param(d >= 0.0, || format!("d = {d} must be nonnegative"))?;
    param(m >= 1.0, || format!("M = {m} must be at least 1"))?;
    Ok(4.0 * d + 10.0 * base.log(m))
}

/// `4 d_k + 10 k ln n` for the k-sparse lift.
/// `n` may be any real `>= k`; the formula only uses `ln n`.
pub fn sparse_vc_bound(d_k: f64, k: u64, n: f64) -> Result<f64> {
    sparse_vc_bound_in_base(d_k, k, n, LogBase::Natural)
}

pub fn sparse_vc_bound_in_base(d_k: f64, k: u64, n: f64, base: LogBase) -> Result<f64> {
    param(k >= 1 && k as f64 <= n, || format!("need 1 <= k <= n, got k={k}, n={n}"))?;
    param(d_k >= 0.0, || format!("d_k = {d_k} must be nonnegative"))?;
    Ok(4.0 * d_k + 10.0 * k as f64 * base.log(n))
}

/// `C (d_k + k ln n) / rate * ln(1 / (delta rate))`.
pub fn sparse_ood_sample_bound(
    d_k: f64,
    k: u64,
    n: f64,
    rate: f64,
    delta: f64,
    c: f64,
) -> Result<f64> {
    sparse_ood_sample_bound_in_base(d_k, k, n, rate, delta, c, LogBase::Natural)
}

pub fn sparse_ood_sample_bound_in_base(
    d_k: f64,
    k: u64,
    n: f64,
    rate: f64,
    delta: f64,
    c: f64,
    base: LogBase,
) -> Result<f64> {
    param(k >= 1 && k as f64 <= n, || format!("need 1 <= k <= n, got k={k}, n={n}"))?;
    param(d_k >= 0.0, || format!("d_k = {d_k} must be nonnegative"))?;
    param(c > 0.0, || format!("C = {c} must be positive"))?;
    open_unit("rate", rate)?;
    open_unit("delta", delta)?;
    rate_bound(d_k + k as f64 * base.log(n), rate, delta, c, base)
}

/// Number of monomials of degree `<= ell` in `k` variables, `C(k+ell, ell)`.
pub fn monomial_count(k: u64, ell: u64) -> BigUint {
    binomial(BigUint::from(k + ell), BigUint::from(ell))
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `2 t C(n+ell, ell) log2(t (t+1) C(n+ell, ell))`.
pub fn semialgebraic_vc_bound(t: u64, ell: u64, n: u64) -> Result<f64> {
    semialgebraic_vc_bound_in_base(t, ell, n, LogBase::Two)
}

pub fn semialgebraic_vc_bound_in_base(t: u64, ell: u64, n: u64, base: LogBase) -> Result<f64> {
    param(t >= 1 && ell >= 1 && n >= 1, || {
        format!("need t, ell, n >= 1, got t={t}, ell={ell}, n={n}")
    })?;
    let m = big_to_f64(&monomial_count(n, ell));
    let t = t as f64;
    Ok(2.0 * t * m * base.log(t * (t + 1.0) * m))
}

/// Parameters of a degree-`ell`, `t`-PTF subspace junta: `kn + t C(k+ell, ell)`.
pub fn parameter_count(n: u64, ell: u64, k: u64, t: u64) -> BigUint {
    BigUint::from(k) * BigUint::from(n) + BigUint::from(t) * monomial_count(k, ell)
}

/// `2 (kn + t C(k+ell, ell)) log2(12 t (ell+1))`.
pub fn subspace_junta_vc_bound(n: u64, ell: u64, k: u64, t: u64) -> Result<f64> {
    subspace_junta_vc_bound_in_base(n, ell, k, t, LogBase::Two)
}

pub fn subspace_junta_vc_bound_in_base(
    n: u64,
    ell: u64,
    k: u64,
    t: u64,
    base: LogBase,
) -> Result<f64> {
    param(k >= 1 && k <= n, || format!("need 1 <= k <= n, got k={k}, n={n}"))?;
    param(t >= 1, || format!("t = {t} must be at least 1"))?;
    let d = big_to_f64(&parameter_count(n, ell, k, t));
    Ok(2.0 * d * base.log(12.0 * t as f64 * (ell as f64 + 1.0)))
}

/// `2 d log2(12 t r)` for a t-combination of sign conditions that are
/// degree-`r` polynomials in `d` parameters.
pub fn t_combination_vc_bound(d: f64, t: u64, r: u64) -> Result<f64> {
    t_combination_vc_bound_in_base(d, t, r, LogBase::Two)
}

pub fn t_combination_vc_bound_in_base(d: f64, t: u64, r: u64, base: LogBase) -> Result<f64> {
    param(d >= 1.0 && t >= 1 && r >= 1, || {
        format!("need d, t, r >= 1, got d={d}, t={t}, r={r}")
    })?;
    Ok(2.0 * d * base.log(12.0 * t as f64 * r as f64))
}

/// Names accepted by [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Blumer,
    AlphaSample,
    Union,
    Sparse,
    SparseOod,
    Semialgebraic,
    SubspaceJunta,
    TCombination,
    MonomialCount,
    ParameterCount,
}

impl BoundKind {
    pub const ALL: [BoundKind; 10] = [
        Self::Blumer,
        Self::AlphaSample,
        Self::Union,
        Self::Sparse,
        Self::SparseOod,
        Self::Semialgebraic,
        Self::SubspaceJunta,
        Self::TCombination,
        Self::MonomialCount,
        Self::ParameterCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Blumer => "blumer",
            Self::AlphaSample => "alpha-sample",
            Self::Union => "union",
            Self::Sparse => "sparse",
            Self::SparseOod => "sparse-ood",
            Self::Semialgebraic => "semialgebraic",
            Self::SubspaceJunta => "subspace-junta",
            Self::TCombination => "t-combination",
            Self::MonomialCount => "monomial-count",
            Self::ParameterCount => "parameter-count",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Parse(format!("unknown bound '{name}'")))
    }

    /// Parameter names the calculator reads.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Self::Blumer => &["d", "epsilon", "delta", "C"],
            Self::AlphaSample => &["d", "alpha", "delta", "C"],
            Self::Union => &["d", "M"],
            Self::Sparse => &["d_k", "k", "n"],
            Self::SparseOod => &["d_k", "k", "n", "rate", "delta", "C"],
            Self::Semialgebraic => &["t", "ell", "n"],
            Self::SubspaceJunta => &["n", "ell", "k", "t"],
            Self::TCombination => &["d", "t", "r"],
            Self::MonomialCount => &["k", "ell"],
            Self::ParameterCount => &["n", "ell", "k", "t"],
        }
    }

    fn default_base(self) -> LogBase {
        match self {
            Self::Semialgebraic | Self::SubspaceJunta | Self::TCombination => LogBase::Two,
            _ => LogBase::Natural,
        }
    }
}

/// Named arguments for [`evaluate`]; `C` defaults to 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub values: std::collections::BTreeMap<String, f64>,
    pub log_base: Option<LogBase>,
}

impl BoundInputs {
    /// Parses `k=v,k=v`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut values = std::collections::BTreeMap::new();
        let mut log_base = None;
        for pair in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("'{pair}' is not key=value")))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "base" {
                log_base = Some(match v {
                    "e" | "ln" | "natural" => LogBase::Natural,
                    "2" | "log2" => LogBase::Two,
                    _ => return Err(Error::Parse(format!("unknown log base '{v}'"))),
                });
                continue;
            }
            let x = match v {
                "e" => std::f64::consts::E,
                "1/e" => 1.0 / std::f64::consts::E,
                _ => v
                    .parse::<f64>()
                    .or_else(|_| crate::rational::parse_decimal(v).map(|q| crate::rational::to_f64(&q)))
                    .map_err(|_| Error::Parse(format!("'{v}' is not a number")))?,
            };
            values.insert(k.to_string(), x);
        }
        Ok(Self { values, log_base })
    }

    fn get(&self, key: &str) -> Result<f64> {
        match self.values.get(key) {
            Some(&v) => Ok(v),
            None if key == "C" => Ok(1.0),
            None => Err(Error::Parameter(format!("missing parameter '{key}'"))),
        }
    }

    fn count(&self, key: &str) -> Result<u64> {
        let v = self.get(key)?;
        param(v >= 0.0 && v.fract() == 0.0, || {
            format!("'{key}' = {v} must be a nonnegative integer")
        })?;
        Ok(v as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub bound: &'static str,
    pub value: f64,
    /// Exact integer value for the counting calculators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub log_base: LogBase,
    /// The formula with the inputs substituted.
    pub formula: String,
}

/// Evaluates a named calculator, rejecting unknown parameter names.
pub fn evaluate(kind: BoundKind, inputs: &BoundInputs) -> Result<BoundValue> {
    if let Some(extra) = inputs
        .values
        .keys()
        .find(|k| !kind.params().contains(&k.as_str()))
    {
        return Err(Error::Parameter(format!(
            "'{extra}' is not a parameter of {} (expected {:?})",
            kind.name(),
            kind.params()
        )));
    }
    let base = inputs.log_base.unwrap_or(kind.default_base());
    let lg = base.symbol();
    let g = |k: &str| inputs.get(k);
    let n = |k: &str| inputs.count(k);
    let (value, exact, formula) = match kind {
        BoundKind::Blumer => {
            let (d, e, dl, c) = (g("d")?, g("epsilon")?, g("delta")?, g("C")?);
            (
                blumer_sample_bound_in_base(d, e, dl, c, base)?,
                None,
                format!("{c}*{d}/{e}*{lg}(1/({dl}*{e}))"),
            )
        }
        BoundKind::AlphaSample => {
            let (d, a, dl, c) = (g("d")?, g("alpha")?, g("delta")?, g("C")?);
            (
                alpha_sample_bound_in_base(d, a, dl, c, base)?,
                None,
                format!("{c}*{d}/{a}*{lg}(1/({dl}*{a}))"),
            )
        }
        BoundKind::Union => {
            let (d, m) = (g("d")?, g("M")?);
            (
                union_vc_bound_in_base(d, m, base)?,
                None,
                format!("4*{d} + 10*{lg}({m})"),
            )
        }
        BoundKind::Sparse => {
            let (d, k, nn) = (g("d_k")?, n("k")?, g("n")?);
            (
                sparse_vc_bound_in_base(d, k, nn, base)?,
                None,
                format!("4*{d} + 10*{k}*{lg}({nn})"),
            )
        }
        BoundKind::SparseOod => {
            let (d, k, nn) = (g("d_k")?, n("k")?, g("n")?);
            let (r, dl, c) = (g("rate")?, g("delta")?, g("C")?);
            (
                sparse_ood_sample_bound_in_base(d, k, nn, r, dl, c, base)?,
                None,
                format!("{c}*({d} + {k}*{lg}({nn}))/{r}*{lg}(1/({dl}*{r}))"),
            )
        }
        BoundKind::Semialgebraic => {
            let (t, ell, nn) = (n("t")?, n("ell")?, n("n")?);
            let m = monomial_count(nn, ell);
            (
                semialgebraic_vc_bound_in_base(t, ell, nn, base)?,
                None,
                format!("2*{t}*{m}*{lg}({t}*{}*{m})", t + 1),
            )
        }
        BoundKind::SubspaceJunta => {
            let (nn, ell, k, t) = (n("n")?, n("ell")?, n("k")?, n("t")?);
            let d = parameter_count(nn, ell, k, t);
            (
                subspace_junta_vc_bound_in_base(nn, ell, k, t, base)?,
                None,
                format!("2*({k}*{nn} + {t}*{})*{lg}(12*{t}*{})", monomial_count(k, ell), ell + 1)
                    + &format!(" = 2*{d}*{lg}({})", 12 * t * (ell + 1)),
            )
        }
        BoundKind::TCombination => {
            let (d, t, r) = (g("d")?, n("t")?, n("r")?);
            (
                t_combination_vc_bound_in_base(d, t, r, base)?,
                None,
                format!("2*{d}*{lg}(12*{t}*{r})"),
            )
        }
        BoundKind::MonomialCount => {
            let (k, ell) = (n("k")?, n("ell")?);
            let m = monomial_count(k, ell);
            (big_to_f64(&m), Some(m.to_string()), format!("C({}, {ell})", k + ell))
        }
        BoundKind::ParameterCount => {
            let (nn, ell, k, t) = (n("n")?, n("ell")?, n("k")?, n("t")?);
            let d = parameter_count(nn, ell, k, t);
            (
                big_to_f64(&d),
                Some(d.to_string()),
                format!("{k}*{nn} + {t}*C({}, {ell})", k + ell),
            )
        }
    };
    Ok(BoundValue {
        bound: kind.name(),
        value,
        exact,
        log_base: base,
        formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn blumer_examples() {
        let m = blumer_sample_bound(1.0, 1.0 / E, 1.0 / E, 1.0).unwrap();
        assert!(close(m, 2.0 * E, 1e-12));
        let m2 = blumer_sample_bound(2.0, 1.0 / E, 1.0 / E, 1.0).unwrap();
        assert!(close(m2, 2.0 * m, 1e-12));
        assert!(blumer_sample_bound(1.0, 0.5, 1.5, 1.0).is_err());
        assert!(blumer_sample_bound(0.0, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn alpha_sample_examples() {
        let a = alpha_sample_bound(3.0, 0.2, 0.1, 2.0).unwrap();
        let b = blumer_sample_bound(3.0, 0.2, 0.1, 2.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(alpha_sample_bound(1.0, 0.0, 0.1, 1.0).unwrap(), f64::INFINITY);
        let v = alpha_sample_bound(2.0, 0.1, 0.1, 1.0).unwrap();
        assert!(close(v, 20.0 * 100f64.ln(), 1e-9));
        assert!(close(v, 92.10, 5e-3));
    }

    #[test]
    fn union_and_sparse_examples() {
        assert_eq!(union_vc_bound(2.5, 1.0).unwrap(), 10.0);
        assert!(close(union_vc_bound(3.0, 100.0).unwrap(), 58.05, 5e-3));
        assert!(close(union_vc_bound(0.0, 2.0).unwrap(), 6.93, 5e-3));
        assert_eq!(sparse_vc_bound(3.0, 1, 1.0).unwrap(), 12.0);
        assert!(close(sparse_vc_bound(2.0, 2, 10.0).unwrap(), 54.05, 5e-3));
        assert!(close(
            sparse_vc_bound(2.0, 2, 10.0).unwrap(),
            union_vc_bound(2.0, 100.0).unwrap(),
            1e-12
        ));
        assert!(sparse_vc_bound(1.0, 3, 2.0).is_err());
    }

    #[test]
    fn sparse_ood_examples() {
        let v = sparse_ood_sample_bound(1.0, 1, 1.0, 0.2, 0.1, 1.0).unwrap();
        assert!(close(v, blumer_sample_bound(1.0, 0.2, 0.1, 1.0).unwrap(), 1e-12));
        let w = sparse_ood_sample_bound(1.0, 1, E, 1.0 / E, 1.0 / E, 1.0).unwrap();
        assert!(close(w, 4.0 * E, 1e-12));
        assert!(close(w, 10.87, 5e-3));
        let rates = [0.05, 0.1, 0.2, 0.4, 0.8];
        let vals: Vec<f64> = rates
            .iter()
            .map(|&r| sparse_ood_sample_bound(2.0, 2, 6.0, r, 0.1, 1.0).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn semialgebraic_examples() {
        assert!(close(semialgebraic_vc_bound(1, 1, 2).unwrap(), 15.51, 5e-3));
        assert!(close(semialgebraic_vc_bound(1, 1, 9).unwrap(), 86.44, 5e-3));
        let grow: Vec<f64> = (1..8).map(|n| semialgebraic_vc_bound(2, 2, n).unwrap()).collect();
        assert!(grow.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn subspace_junta_examples() {
        assert_eq!(parameter_count(2, 1, 1, 1), BigUint::from(4u32));
        let v = subspace_junta_vc_bound(2, 1, 1, 1).unwrap();
        assert!(close(v, 36.68, 5e-3));
        assert!(v >= 3.0);
        let t = t_combination_vc_bound(4.0, 1, 2).unwrap();
        assert!(close(v, t, 1e-12));
        let (n, k, t, ell) = (5u64, 2u64, 3u64, 2u64);
        let diff = subspace_junta_vc_bound(2 * n, ell, k, t).unwrap()
            - subspace_junta_vc_bound(n, ell, k, t).unwrap();
        let expect = 2.0 * (k * n) as f64 * (12.0 * t as f64 * (ell + 1) as f64).log2();
        assert!(close(diff, expect, 1e-9));
    }

    #[test]
    fn t_combination_examples() {
        assert!(close(t_combination_vc_bound(1.0, 1, 1).unwrap(), 7.17, 5e-3));
        assert_eq!(
            t_combination_vc_bound(2.0, 3, 2).unwrap(),
            2.0 * t_combination_vc_bound(1.0, 3, 2).unwrap()
        );
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_count(7, 0), BigUint::from(1u32));
        assert_eq!(monomial_count(2, 2), BigUint::from(6u32));
        assert_eq!(monomial_count(3, 5), binomial(BigUint::from(8u32), BigUint::from(3u32)));
    }

    #[test]
    fn evaluate_by_name() {
        let v = evaluate(BoundKind::Union, &BoundInputs::parse("d=3,M=100").unwrap()).unwrap();
        assert!(close(v.value, 58.05, 5e-3));
        assert_eq!(v.formula, "4*3 + 10*ln(100)");
        let b = evaluate(
            BoundKind::Blumer,
            &BoundInputs::parse("d=1,epsilon=1/e,delta=1/e").unwrap(),
        )
        .unwrap();
        assert!(close(b.value, 2.0 * E, 1e-12));
        let p = evaluate(
            BoundKind::ParameterCount,
            &BoundInputs::parse("n=2,ell=1,k=1,t=1").unwrap(),
        )
        .unwrap();
        assert_eq!(p.exact.as_deref(), Some("4"));
        assert!(evaluate(BoundKind::Union, &BoundInputs::parse("d=1,M=2,q=3").unwrap()).is_err());
        assert!(evaluate(BoundKind::Union, &BoundInputs::parse("d=1").unwrap()).is_err());
        let natural = evaluate(
            BoundKind::TCombination,
            &BoundInputs::parse("d=1,t=1,r=1,base=e").unwrap(),
        )
        .unwrap();
        assert!(close(natural.value, 2.0 * 12f64.ln(), 1e-12));
    }
}
