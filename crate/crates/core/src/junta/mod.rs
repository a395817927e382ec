//! Subspace juntas `f(x) = g(Wx)` over exact rationals.
//!
//! The inner function `g` is a halfspace, a polynomial threshold function,
//! a boolean combination of PTFs, or the square wave. PTFs output 1 when the
//! polynomial is `>= 0`, so sign(0) counts as positive.

pub mod dyadic;
pub mod linalg;
pub mod transfer;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{serde_q, Q};
use crate::{Error, Result};

pub use dyadic::{shattering_weight, square_wave, verify_all, verify_shatter, DyadicRational};
pub use transfer::{transfer_identity_check, PointMassMeasure, TransferReport};

/// Exponent vector of a monomial; `exponents[j]` is the power of variable `j`.
pub type Exponents = Vec<u32>;

/// A polynomial threshold function in `arity` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PtfDoc", into = "PtfDoc")]
pub struct Ptf {
    arity: usize,
    degree: u32,
    terms: BTreeMap<Exponents, Q>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PtfDoc {
    arity: usize,
    degree: u32,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    exponents: Exponents,
    #[serde(with = "serde_q")]
    coeff: Q,
}

impl TryFrom<PtfDoc> for Ptf {
    type Error = Error;

    fn try_from(doc: PtfDoc) -> Result<Self> {
        Ptf::new(
            doc.arity,
            doc.degree,
            doc.terms.into_iter().map(|t| (t.exponents, t.coeff)).collect(),
        )
    }
}

impl From<Ptf> for PtfDoc {
    fn from(p: Ptf) -> Self {
        PtfDoc {
            arity: p.arity,
            degree: p.degree,
            terms: p
                .terms
                .into_iter()
                .map(|(exponents, coeff)| TermDoc { exponents, coeff })
                .collect(),
        }
    }
}

impl Ptf {
    /// Terms with equal exponents are summed; zero coefficients dropped.
    pub fn new(arity: usize, degree: u32, terms: Vec<(Exponents, Q)>) -> Result<Self> {
        let mut map: BTreeMap<Exponents, Q> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != arity {
                return Err(Error::Arity(format!(
                    "monomial {e:?} has {} exponents, PTF arity is {arity}",
                    e.len()
                )));
            }
            let total: u32 = e.iter().sum();
            if total > degree {
                return Err(Error::Parameter(format!(
                    "monomial {e:?} has degree {total} > declared degree {degree}"
                )));
            }
            *map.entry(e).or_insert_with(Q::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self {
            arity,
            degree,
            terms: map,
        })
    }

    /// `sum_j w_j u_j - threshold`.
    pub fn affine(weights: &[Q], threshold: &Q) -> Self {
        let k = weights.len();
        let mut terms = vec![(vec![0; k], -threshold.clone())];
        for (j, w) in weights.iter().enumerate() {
            let mut e = vec![0; k];
            e[j] = 1;
            terms.push((e, w.clone()));
        }
        Self::new(k, 1, terms).expect("affine terms are well formed")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Q> {
        &self.terms
    }

    pub fn value(&self, u: &[Q]) -> Result<Q> {
        if u.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                got: u.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(u)
                    .fold(c.clone(), |acc, (&p, x)| acc * num_traits::pow(x.clone(), p as usize))
            })
            .sum())
    }

    pub fn sign(&self, u: &[Q]) -> Result<bool> {
        Ok(!self.value(u)?.is_negative())
    }

    /// The polynomial `x -> p(Wx)` in the ambient variables, expanded.
    pub fn compose_linear(&self, w: &[Vec<Q>], n: usize) -> Result<Ptf> {
        if w.len() != self.arity {
            return Err(Error::Arity(format!(
                "PTF arity {} but W has {} rows",
                self.arity,
                w.len()
            )));
        }
        let rows: Vec<Poly> = w.iter().map(|row| Poly::linear(row)).collect();
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(n, c.clone());
            for (row, &p) in rows.iter().zip(e) {
                for _ in 0..p {
                    term = term.mul(row);
                }
            }
            out.add_assign(&term);
        }
        Ptf::new(n, self.degree, out.0.into_iter().collect())
    }
}

#[derive(Debug, Clone, Default)]
struct Poly(BTreeMap<Exponents, Q>);

impl Poly {
    fn constant(n: usize, c: Q) -> Self {
        Self(BTreeMap::from([(vec![0; n], c)]))
    }

    fn linear(row: &[Q]) -> Self {
        let n = row.len();
        let mut map = BTreeMap::new();
        for (j, c) in row.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let mut e = vec![0; n];
            e[j] = 1;
            map.insert(e, c.clone());
        }
        Self(map)
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out: BTreeMap<Exponents, Q> = BTreeMap::new();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &other.0 {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.entry(e).or_insert_with(Q::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Poly(out)
    }

    fn add_assign(&mut self, other: &Poly) {
        for (e, c) in &other.0 {
            *self.0.entry(e.clone()).or_insert_with(Q::zero) += c;
        }
        self.0.retain(|_, c| !c.is_zero());
    }
}

/// The inner function `g` of a junta.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnerFunction {
    /// 1 iff `weights . u >= threshold`.
    Halfspace {
        #[serde(with = "serde_q::vec")]
        weights: Vec<Q>,
        #[serde(with = "serde_q")]
        threshold: Q,
    },
    Ptf {
        ptf: Ptf,
    },
    /// `table[sum_i sign_i << i]` over the PTF outputs.
    Combination { ptfs: Vec<Ptf>, table: Vec<u8> },
    /// 1 iff `floor(u)` is odd; arity 1.
    SquareWave,
}

impl InnerFunction {
    pub fn combination(ptfs: Vec<Ptf>, table: Vec<bool>) -> Result<Self> {
        let f = InnerFunction::Combination {
            ptfs,
            table: table.into_iter().map(u8::from).collect(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn arity(&self) -> usize {
        match self {
            Self::Halfspace { weights, .. } => weights.len(),
            Self::Ptf { ptf } => ptf.arity,
            Self::Combination { ptfs, .. } => ptfs.first().map_or(0, |p| p.arity),
            Self::SquareWave => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Combination { ptfs, table } = self {
            if ptfs.is_empty() || ptfs.len() > 20 {
                return Err(Error::Parameter(format!(
                    "a combination needs 1..=20 PTFs, got {}",
                    ptfs.len()
                )));
            }
            if ptfs.iter().any(|p| p.arity != ptfs[0].arity) {
                return Err(Error::Arity("combined PTFs differ in arity".into()));
            }
            if table.len() != 1 << ptfs.len() {
                return Err(Error::Parameter(format!(
                    "boolean table has {} entries, expected 2^{} = {}",
                    table.len(),
                    ptfs.len(),
                    1usize << ptfs.len()
                )));
            }
            if table.iter().any(|&b| b > 1) {
                return Err(Error::Parameter("boolean table entries must be 0 or 1".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, u: &[Q]) -> Result<bool> {
        if u.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                got: u.len(),
            });
        }
        match self {
            Self::Halfspace { weights, threshold } => {
                let dot: Q = weights.iter().zip(u).map(|(w, x)| w * x).sum();
                Ok(dot >= *threshold)
            }
            Self::Ptf { ptf } => ptf.sign(u),
            Self::Combination { ptfs, table } => {
                let mut index = 0;
                for (i, p) in ptfs.iter().enumerate() {
                    index |= usize::from(p.sign(u)?) << i;
                }
                Ok(table[index] == 1)
            }
            Self::SquareWave => {
                let f = u[0].floor().to_integer();
                Ok(f % 2u8 != num_bigint::BigInt::zero())
            }
        }
    }
}

/// `f(x) = g(Wx)` with `W` a `k x n` rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "JuntaDoc", into = "JuntaDoc")]
pub struct SubspaceJunta {
    w: Vec<Vec<Q>>,
    n: usize,
    inner: InnerFunction,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JuntaDoc {
    #[serde(with = "serde_q::matrix")]
    w: Vec<Vec<Q>>,
    inner: InnerFunction,
}

impl TryFrom<JuntaDoc> for SubspaceJunta {
    type Error = Error;

    fn try_from(doc: JuntaDoc) -> Result<Self> {
        SubspaceJunta::new(doc.w, doc.inner)
    }
}

impl From<SubspaceJunta> for JuntaDoc {
    fn from(f: SubspaceJunta) -> Self {
        JuntaDoc {
            w: f.w,
            inner: f.inner,
        }
    }
}

impl SubspaceJunta {
    /// Rejects ragged or all-zero rows, `k > n`, and an inner arity other than `k`.
    /// `W` need not have full rank.
    pub fn new(w: Vec<Vec<Q>>, inner: InnerFunction) -> Result<Self> {
        let k = w.len();
        let n = w.first().map_or(0, Vec::len);
        if k == 0 || n == 0 {
            return Err(Error::Parameter("W must have at least one row and column".into()));
        }
        if let Some(bad) = w.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        if k > n {
            return Err(Error::Parameter(format!("W has k = {k} rows but only n = {n} columns")));
        }
        if let Some(i) = w.iter().position(|r| r.iter().all(Zero::is_zero)) {
            return Err(Error::Parameter(format!("row {i} of W is all zero")));
        }
        inner.validate()?;
        if inner.arity() != k {
            return Err(Error::Arity(format!(
                "inner function takes {} inputs but W has {k} rows",
                inner.arity()
            )));
        }
        Ok(Self { w, n, inner })
    }

    /// The 0/1 row selector for `indices` composed with `inner`.
    pub fn coordinate(n: usize, indices: &[usize], inner: InnerFunction) -> Result<Self> {
        let w = indices
            .iter()
            .map(|&i| {
                if i >= n {
                    return Err(Error::InvalidFeatureSet { index: i, n });
                }
                Ok((0..n).map(|j| if j == i { Q::one() } else { Q::zero() }).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(w, inner)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("junta serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    pub fn w(&self) -> &[Vec<Q>] {
        &self.w
    }

    pub fn inner(&self) -> &InnerFunction {
        &self.inner
    }

    pub fn project(&self, x: &[Q]) -> Result<Vec<Q>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self
            .w
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn evaluate(&self, x: &[Q]) -> Result<bool> {
        self.inner.eval(&self.project(x)?)
    }

    /// The same function written as an inner function of the ambient
    /// coordinates (identity `W`), by expanding every polynomial `p(Wx)`.
    /// Fails for the square wave, which is not semi-algebraic.
    pub fn ambient_form(&self) -> Result<InnerFunction> {
        match &self.inner {
            InnerFunction::Halfspace { weights, threshold } => {
                let p = Ptf::affine(weights, threshold);
                Ok(InnerFunction::Ptf {
                    ptf: p.compose_linear(&self.w, self.n)?,
                })
            }
            InnerFunction::Ptf { ptf } => Ok(InnerFunction::Ptf {
                ptf: ptf.compose_linear(&self.w, self.n)?,
            }),
            InnerFunction::Combination { ptfs, table } => Ok(InnerFunction::Combination {
                ptfs: ptfs
                    .iter()
                    .map(|p| p.compose_linear(&self.w, self.n))
                    .collect::<Result<_>>()?,
                table: table.clone(),
            }),
            InnerFunction::SquareWave => Err(Error::Precondition(
                "the square wave has no polynomial form".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn halfspace_sign() {
        let f = SubspaceJunta::new(
            vec![qs(&[1, 0])],
            InnerFunction::Halfspace {
                weights: qs(&[1]),
                threshold: qi(0),
            },
        )
        .unwrap();
        assert!(!f.evaluate(&qs(&[-1, 5])).unwrap());
        assert!(f.evaluate(&qs(&[0, -5])).unwrap());
        assert!(matches!(
            f.evaluate(&qs(&[1])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn quadratic_ptf() {
        let p = Ptf::new(1, 2, vec![(vec![2], qi(1)), (vec![0], qi(-1))]).unwrap();
        let f = SubspaceJunta::new(vec![qs(&[1])], InnerFunction::Ptf { ptf: p.clone() }).unwrap();
        assert_eq!(p.value(&qs(&[2])).unwrap(), qi(3));
        assert!(f.evaluate(&qs(&[2])).unwrap());
        assert!(!f.evaluate(&[q(1, 2)]).unwrap());
        // sign(0) is positive
        assert!(f.evaluate(&qs(&[1])).unwrap());
    }

    #[test]
    fn construction_checks() {
        let hs = |k: usize| InnerFunction::Halfspace {
            weights: vec![qi(1); k],
            threshold: qi(0),
        };
        assert!(SubspaceJunta::new(vec![qs(&[0, 0])], hs(1)).is_err());
        assert!(SubspaceJunta::new(vec![qs(&[1]), qs(&[2])], hs(2)).is_err());
        assert!(SubspaceJunta::new(vec![qs(&[1, 0])], hs(2)).is_err());
        assert!(SubspaceJunta::new(vec![qs(&[1, 0]), qs(&[0])], hs(2)).is_err());
        // rank-deficient W is allowed
        assert!(SubspaceJunta::new(vec![qs(&[1, 1]), qs(&[2, 2])], hs(2)).is_ok());
        assert!(Ptf::new(1, 1, vec![(vec![2], qi(1))]).is_err());
        let p = Ptf::affine(&qs(&[1]), &qi(0));
        assert!(InnerFunction::combination(vec![p.clone(), p], vec![true; 3]).is_err());
    }

    #[test]
    fn square_wave_inner() {
        let f = SubspaceJunta::new(vec![vec![q(5, 8)]], InnerFunction::SquareWave).unwrap();
        let outs: Vec<bool> = [2, 4, 8]
            .iter()
            .map(|&x| f.evaluate(&[qi(x)]).unwrap())
            .collect();
        assert_eq!(outs, vec![true, false, true]);
        assert!(SubspaceJunta::new(vec![qs(&[-1])], InnerFunction::SquareWave)
            .unwrap()
            .evaluate(&[q(1, 2)])
            .unwrap());
    }

    #[test]
    fn ambient_form_agrees() {
        // g(u, v) = [u^2 + uv - 1 >= 0] XOR [v >= 1/2]
        let p1 = Ptf::new(
            2,
            2,
            vec![(vec![2, 0], qi(1)), (vec![1, 1], qi(1)), (vec![0, 0], qi(-1))],
        )
        .unwrap();
        let p2 = Ptf::affine(&qs(&[0, 1]), &q(1, 2));
        let inner = InnerFunction::combination(vec![p1, p2], vec![false, true, true, false]).unwrap();
        let w = vec![vec![q(1, 2), qi(-1), qi(2)], vec![qi(0), q(3, 4), qi(1)]];
        let f = SubspaceJunta::new(w, inner).unwrap();
        let amb = f.ambient_form().unwrap();
        assert_eq!(amb.arity(), 3);
        if let InnerFunction::Combination { ptfs, .. } = &amb {
            assert!(ptfs.iter().all(|p| p.terms().keys().all(|e| e.iter().sum::<u32>() <= 2)));
        }
        for a in -3..=3 {
            for b in -3..=3 {
                for c in -2..=2 {
                    let x = vec![q(a, 2), q(b, 3), qi(c)];
                    assert_eq!(f.evaluate(&x).unwrap(), amb.eval(&x).unwrap(), "{x:?}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = Ptf::new(2, 2, vec![(vec![1, 1], q(-3, 2)), (vec![0, 0], qi(1))]).unwrap();
        let inner = InnerFunction::combination(
            vec![p, Ptf::affine(&qs(&[1, 1]), &qi(0))],
            vec![true, false, false, true],
        )
        .unwrap();
        let f = SubspaceJunta::new(vec![vec![q(1, 3), qi(0), qi(1)], qs(&[0, 1, 0])], inner).unwrap();
        let back = SubspaceJunta::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let text = r#"{"w": [["0.5", "1"]], "inner": {"kind": "square_wave"}}"#;
        let g = SubspaceJunta::from_json(text).unwrap();
        assert_eq!(g.w()[0][0], q(1, 2));
        assert!(SubspaceJunta::from_json(r#"{"w": [["0", "0"]], "inner": {"kind": "square_wave"}}"#).is_err());
        assert!(SubspaceJunta::from_json(r#"{"w": [["1"]], "inner": {"kind": "square_wave"}, "x": 1}"#).is_err());
    }
}
