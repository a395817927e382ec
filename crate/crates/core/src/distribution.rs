//! Exact finite distributions over structured sample spaces `S^n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hypothesis::Hypothesis;
use crate::rational::{format_rational, parse_rational, Q};
use crate::{Error, Result};

/// A single feature value. The feature space `S` is a finite set of these.
pub type Value = i64;

/// The finite stand-in for `S` together with the number of features `n`.
///
/// One value set is shared by every feature. Values are kept sorted so the
/// lexicographic order on points matches the order of [`FeatureSpace::points`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSpace {
    n: usize,
    values: Vec<Value>,
}

impl FeatureSpace {
    pub fn new(n: usize, values: Vec<Value>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidFeatureSpace("n must be at least 1".into()));
        }
        Self::with_arity(n, values)
    }

    /// Same as [`FeatureSpace::new`] but admits `n = 0`, the space of the
    /// empty tuple produced by marginalizing to no features.
    pub(crate) fn with_arity(n: usize, mut values: Vec<Value>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidFeatureSpace("value set is empty".into()));
        }
        let len = values.len();
        values.sort_unstable();
        values.dedup();
        if values.len() != len {
            return Err(Error::InvalidFeatureSpace(
                "value set contains duplicates".into(),
            ));
        }
        Ok(Self { n, values })
    }

    /// `{0, 1}^n`.
    pub fn binary(n: usize) -> Result<Self> {
        Self::new(n, vec![0, 1])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    /// Same value set with a different number of features.
    pub fn restricted(&self, n: usize) -> FeatureSpace {
        FeatureSpace {
            n,
            values: self.values.clone(),
        }
    }

    /// `|S|^n`, or `None` on overflow.
    pub fn size(&self) -> Option<usize> {
        self.values.len().checked_pow(self.n as u32)
    }

    pub fn contains(&self, p: &StructuredPoint) -> bool {
        p.0.len() == self.n && p.0.iter().all(|v| self.values.binary_search(v).is_ok())
    }

    /// Position of `p` in the lexicographic enumeration of `S^n`.
    pub fn index_of(&self, p: &StructuredPoint) -> Option<usize> {
        if p.0.len() != self.n {
            return None;
        }
        let base = self.values.len();
        let mut idx = 0usize;
        for v in &p.0 {
            let pos = self.values.binary_search(v).ok()?;
            idx = idx * base + pos;
        }
        Some(idx)
    }

    pub fn point_at(&self, mut index: usize) -> StructuredPoint {
        let base = self.values.len();
        let mut coords = vec![0; self.n];
        for slot in coords.iter_mut().rev() {
            *slot = self.values[index % base];
            index /= base;
        }
        StructuredPoint(coords)
    }

    /// All points of `S^n` in lexicographic order.
    pub fn points(&self) -> Result<Vec<StructuredPoint>> {
        let size = self.size().ok_or_else(|| {
            Error::InvalidFeatureSpace("|S|^n overflows the address space".into())
        })?;
        Ok((0..size).map(|i| self.point_at(i)).collect())
    }
}

/// A point of `S^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StructuredPoint(pub Vec<Value>);

impl StructuredPoint {
    pub fn new(coords: Vec<Value>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[Value] {
        &self.0
    }

    /// Coordinates at `features`, in the order given.
    pub fn restrict(&self, features: &[usize]) -> StructuredPoint {
        StructuredPoint(features.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for StructuredPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Sorted, duplicate-free list of feature indices, validated against `n`.
pub fn feature_set(features: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut out = features.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&bad) = out.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidFeatureSet { index: bad, n });
    }
    Ok(out)
}

/// `[n] - features`.
pub fn complement(features: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !features.contains(i)).collect()
}

/// An exact-probability distribution with finitely many atoms.
///
/// Atoms carry strictly positive probabilities summing to exactly one and are
/// stored in lexicographic order of their points, so two distributions are
/// equal iff they are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDistribution {
    space: FeatureSpace,
    atoms: Vec<(StructuredPoint, Q)>,
}

impl FiniteDistribution {
    pub fn new(space: FeatureSpace, atoms: Vec<(StructuredPoint, Q)>) -> Result<Self> {
        let mut merged: BTreeMap<StructuredPoint, Q> = BTreeMap::new();
        for (p, w) in atoms {
            if !space.contains(&p) {
                return Err(Error::InvalidDistribution(format!(
                    "point {p} is not in the feature space"
                )));
            }
            if w.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative probability at {p}"
                )));
            }
            if merged.contains_key(&p) {
                return Err(Error::InvalidDistribution(format!("duplicate atom {p}")));
            }
            merged.insert(p, w);
        }
        let total: Q = merged.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {} instead of 1",
                format_rational(&total)
            )));
        }
        Ok(Self::from_sorted(space, merged))
    }

    fn from_sorted(space: FeatureSpace, merged: BTreeMap<StructuredPoint, Q>) -> Self {
        let atoms = merged.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        Self { space, atoms }
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(space: FeatureSpace, weights: Vec<(StructuredPoint, Q)>) -> Result<Self> {
        let total: Q = weights.iter().map(|(_, w)| w).sum();
        if !total.is_positive() {
            return Err(Error::InvalidDistribution("total weight is zero".into()));
        }
        let atoms = weights.into_iter().map(|(p, w)| (p, w / &total)).collect();
        Self::new(space, atoms)
    }

    pub fn point_mass(space: FeatureSpace, point: StructuredPoint) -> Result<Self> {
        Self::new(space, vec![(point, Q::one())])
    }

    pub fn uniform(space: FeatureSpace, points: Vec<StructuredPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDistribution("uniform over no points".into()));
        }
        let p = Q::new(BigInt::one(), BigInt::from(points.len()));
        let atoms = points.into_iter().map(|x| (x, p.clone())).collect();
        Self::new(space, atoms)
    }

    /// Uniform over all of `S^n`.
    pub fn uniform_on_space(space: FeatureSpace) -> Result<Self> {
        let pts = space.points()?;
        Self::uniform(space, pts)
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn atoms(&self) -> &[(StructuredPoint, Q)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &StructuredPoint> {
        self.atoms.iter().map(|(p, _)| p)
    }

    pub fn prob(&self, p: &StructuredPoint) -> Q {
        match self.atoms.binary_search_by(|(x, _)| x.cmp(p)) {
            Ok(i) => self.atoms[i].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    /// Probability of the event `{x : pred(x)}`.
    pub fn mass_where(&self, mut pred: impl FnMut(&StructuredPoint) -> bool) -> Q {
        self.atoms
            .iter()
            .filter(|(p, _)| pred(p))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn total_mass(&self) -> Q {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// `D_A`: the distribution of `x_A` for `x ~ D`, features in ascending order.
    pub fn marginalize(&self, features: &[usize]) -> Result<FiniteDistribution> {
        let a = feature_set(features, self.space.n)?;
        let mut merged: BTreeMap<StructuredPoint, Q> = BTreeMap::new();
        for (p, w) in &self.atoms {
            *merged.entry(p.restrict(&a)).or_insert_with(Q::zero) += w;
        }
        Ok(Self::from_sorted(
            FeatureSpace::with_arity(a.len(), self.space.values.clone())?,
            merged,
        ))
    }

    /// Distribution of `x_B`, `B = [n] - A`, given `x_A = partial`.
    pub fn condition(
        &self,
        features: &[usize],
        partial: &StructuredPoint,
    ) -> Result<FiniteDistribution> {
        let a = feature_set(features, self.space.n)?;
        if partial.0.len() != a.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: partial.0.len(),
            });
        }
        let b = complement(&a, self.space.n);
        let mut merged: BTreeMap<StructuredPoint, Q> = BTreeMap::new();
        let mut event = Q::zero();
        for (p, w) in &self.atoms {
            if p.restrict(&a) == *partial {
                event += w;
                *merged.entry(p.restrict(&b)).or_insert_with(Q::zero) += w;
            }
        }
        if event.is_zero() {
            return Err(Error::ConditioningOnNull);
        }
        for w in merged.values_mut() {
            *w /= &event;
        }
        Ok(Self::from_sorted(
            FeatureSpace::with_arity(b.len(), self.space.values.clone())?,
            merged,
        ))
    }

    /// Joint distribution on `S^n` from a marginal on `S^A` and one
    /// conditional on `S^B` per marginal atom.
    ///
    /// `marginalize(result, A)` equals `marginal` exactly.
    pub fn compose<F>(
        space: &FeatureSpace,
        features: &[usize],
        marginal: &FiniteDistribution,
        mut family: F,
    ) -> Result<FiniteDistribution>
    where
        F: FnMut(&StructuredPoint) -> Option<FiniteDistribution>,
    {
        let a = feature_set(features, space.n)?;
        let b = complement(&a, space.n);
        if marginal.space.n != a.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: marginal.space.n,
            });
        }
        let mut merged: BTreeMap<StructuredPoint, Q> = BTreeMap::new();
        for (xa, wa) in &marginal.atoms {
            let cond = family(xa).ok_or_else(|| Error::IncompleteFamily(xa.to_string()))?;
            if cond.space.n != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: b.len(),
                    got: cond.space.n,
                });
            }
            for (xb, wb) in &cond.atoms {
                let mut coords = vec![0; space.n];
                for (slot, &i) in a.iter().enumerate() {
                    coords[i] = xa.0[slot];
                }
                for (slot, &i) in b.iter().enumerate() {
                    coords[i] = xb.0[slot];
                }
                let p = StructuredPoint(coords);
                if !space.contains(&p) {
                    return Err(Error::InvalidDistribution(format!(
                        "composed point {p} is not in the feature space"
                    )));
                }
                *merged.entry(p).or_insert_with(Q::zero) += wa * wb;
            }
        }
        Ok(Self::from_sorted(space.clone(), merged))
    }

    /// `Pr_{x ~ D}[h(x) = f(x)]`.
    pub fn agreement_probability(&self, h: &Hypothesis, f: &Hypothesis) -> Result<Q> {
        let mut total = Q::zero();
        for (p, w) in &self.atoms {
            if h.eval(p)? == f.eval(p)? {
                total += w;
            }
        }
        Ok(total)
    }

    /// `Pr_{x ~ D}[h(x) != f(x)]`.
    pub fn disagreement_probability(&self, h: &Hypothesis, f: &Hypothesis) -> Result<Q> {
        Ok(Q::one() - self.agreement_probability(h, f)?)
    }

    /// `m` independent draws.
    ///
    /// When every probability fits over a common `u64` denominator the draw
    /// is exact; otherwise probabilities are rounded to `f64` weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, m: usize) -> Vec<StructuredPoint> {
        let probs: Vec<&Q> = self.atoms.iter().map(|(_, w)| w).collect();
        crate::rng::weighted_indices(rng, &probs, m)
            .into_iter()
            .map(|i| self.atoms[i].0.clone())
            .collect()
    }


    pub fn to_doc(&self) -> DistributionDoc {
        DistributionDoc {
            n: self.space.n,
            values: self.space.values.clone(),
            atoms: self
                .atoms
                .iter()
                .map(|(p, w)| AtomDoc {
                    point: p.0.clone(),
                    p: format_rational(w),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &DistributionDoc) -> Result<Self> {
        let space = FeatureSpace::new(doc.n, doc.values.clone())?;
        let atoms = doc
            .atoms
            .iter()
            .map(|a| Ok((StructuredPoint(a.point.clone()), parse_rational(&a.p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("distribution serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }
}

/// Wire form of a [`FiniteDistribution`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionDoc {
    pub n: usize,
    pub values: Vec<Value>,
    pub atoms: Vec<AtomDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub point: Vec<Value>,
    /// Probability as `"num/den"`.
    pub p: String,
}
