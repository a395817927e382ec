//! Total binary hypotheses over a finite product domain `S^n`.
//!
//! A hypothesis is stored extensionally as a truth table indexed by the
//! lexicographic enumeration of [`FeatureSpace::points`]. Symbolic forms
//! (dictators, thresholds, XOR, grue, ...) are only constructors, so two
//! hypotheses are equal exactly when they compute the same function.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distribution::{feature_set, FeatureSpace, StructuredPoint, Value};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    space: Arc<FeatureSpace>,
    bits: Vec<u64>,
    len: usize,
}

impl Hypothesis {
    pub fn from_fn(
        space: impl Into<Arc<FeatureSpace>>,
        mut rule: impl FnMut(&StructuredPoint) -> bool,
    ) -> Result<Self> {
        let space = space.into();
        let len = space.size().filter(|&s| s <= 1 << 26).ok_or_else(|| {
            Error::SizeCap {
                what: "hypothesis domain",
                size: usize::MAX,
                cap: 1 << 26,
                hint: "",
            }
        })?;
        let mut bits = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            if rule(&space.point_at(i)) {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(Self { space, bits, len })
    }

    pub fn from_table(space: impl Into<Arc<FeatureSpace>>, table: &[bool]) -> Result<Self> {
        let space = space.into();
        let size = space.size();
        if size != Some(table.len()) {
            return Err(Error::DimensionMismatch {
                expected: size.unwrap_or(usize::MAX),
                got: table.len(),
            });
        }
        Self::from_fn(space.clone(), |p| table[space.index_of(p).expect("in space")])
    }

    pub fn constant(space: impl Into<Arc<FeatureSpace>>, value: bool) -> Self {
        Self::from_fn(space, |_| value).expect("constant over an addressable space")
    }

    /// `x -> [x_i != 0]`.
    pub fn dictator(space: impl Into<Arc<FeatureSpace>>, feature: usize) -> Result<Self> {
        let space = space.into();
        check_feature(&space, feature)?;
        Self::from_fn(space, |p| p.0[feature] != 0)
    }

    /// `x -> [x_i == 0]`.
    pub fn negated_dictator(space: impl Into<Arc<FeatureSpace>>, feature: usize) -> Result<Self> {
        Ok(Self::dictator(space, feature)?.negate())
    }

    /// `x -> [x_i >= cutoff]`, or `[x_i < cutoff]` when `below` is set.
    pub fn threshold(
        space: impl Into<Arc<FeatureSpace>>,
        feature: usize,
        cutoff: Value,
        below: bool,
    ) -> Result<Self> {
        let space = space.into();
        check_feature(&space, feature)?;
        Self::from_fn(space, |p| (p.0[feature] >= cutoff) != below)
    }

    /// `x -> [x_i != 0] xor [x_j != 0]`.
    pub fn xor(space: impl Into<Arc<FeatureSpace>>, i: usize, j: usize) -> Result<Self> {
        let space = space.into();
        check_feature(&space, i)?;
        check_feature(&space, j)?;
        Self::from_fn(space, |p| (p.0[i] != 0) != (p.0[j] != 0))
    }

    /// The grue rule: `e` before the switch time, `1 - e` from then on.
    pub fn grue(
        space: impl Into<Arc<FeatureSpace>>,
        time: usize,
        emerald: usize,
        switch: Value,
    ) -> Result<Self> {
        let space = space.into();
        check_feature(&space, time)?;
        check_feature(&space, emerald)?;
        Self::from_fn(space, |p| {
            let e = p.0[emerald] != 0;
            if p.0[time] < switch {
                e
            } else {
                !e
            }
        })
    }

    pub fn negate(&self) -> Self {
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        Self {
            space: self.space.clone(),
            bits,
            len: self.len,
        }
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    /// Number of domain points.
    pub fn domain_size(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn value_at(&self, index: usize) -> bool {
        self.bits[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn eval(&self, p: &StructuredPoint) -> Result<bool> {
        let idx = self
            .space
            .index_of(p)
            .ok_or_else(|| Error::DomainMismatch(p.to_string()))?;
        Ok(self.value_at(idx))
    }

    pub fn table(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.value_at(i)).collect()
    }

    /// `x -> h(x_{i(1)}, ..., x_{i(k)})` on `S^n`.
    pub fn lift(&self, n: usize, indices: &[usize]) -> Result<Hypothesis> {
        let k = self.space.n();
        if indices.len() != k {
            return Err(Error::Arity(format!(
                "{} indices given for an inner hypothesis of arity {k}",
                indices.len()
            )));
        }
        if feature_set(indices, n)?.len() != k {
            return Err(Error::Arity("lift indices must be distinct".into()));
        }
        let target = Arc::new(self.space.restricted(n));
        Self::from_fn(target, |p| {
            let inner = p.restrict(indices);
            self.value_at(self.space.index_of(&inner).expect("values shared"))
        })
    }
}

fn check_feature(space: &FeatureSpace, feature: usize) -> Result<()> {
    if feature >= space.n() {
        return Err(Error::InvalidFeatureSet {
            index: feature,
            n: space.n(),
        });
    }
    Ok(())
}

/// `Feat(h)`: coordinates `i` such that some pair of points differing only
/// at `i` receives different labels.
pub fn feat(h: &Hypothesis) -> Vec<usize> {
    let n = h.space.n();
    let base = h.space.values().len();
    let mut out = Vec::new();
    for i in 0..n {
        let stride = base.pow((n - 1 - i) as u32);
        let depends = (0..h.len).any(|idx| {
            let digit = (idx / stride) % base;
            digit != 0 && h.value_at(idx) != h.value_at(idx - digit * stride)
        });
        if depends {
            out.push(i);
        }
    }
    out
}

/// A finite set of functions over one shared domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisClass {
    space: Arc<FeatureSpace>,
    members: Vec<Hypothesis>,
}

impl HypothesisClass {
    /// Builds a class, dropping functional duplicates (first occurrence wins).
    pub fn new(space: impl Into<Arc<FeatureSpace>>, members: Vec<Hypothesis>) -> Result<Self> {
        let space = space.into();
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(members.len());
        for h in members {
            if *h.space != *space {
                return Err(Error::DomainMismatch(format!(
                    "member over {}-feature space in a {}-feature class",
                    h.space.n(),
                    space.n()
                )));
            }
            if seen.insert(h.bits.clone()) {
                kept.push(Hypothesis {
                    space: space.clone(),
                    ..h
                });
            }
        }
        Ok(Self {
            space,
            members: kept,
        })
    }

    /// Every function `S^n -> {0,1}`; only sensible for tiny domains.
    pub fn all_functions(space: impl Into<Arc<FeatureSpace>>) -> Result<Self> {
        let space = space.into();
        let size = space.size().unwrap_or(usize::MAX);
        if size > 16 {
            return Err(Error::SizeCap {
                what: "domain for the full function class",
                size,
                cap: 16,
                hint: "",
            });
        }
        let members = (0u64..1 << size)
            .map(|mask| {
                let table: Vec<bool> = (0..size).map(|i| mask >> i & 1 == 1).collect();
                Hypothesis::from_table(space.clone(), &table)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, members)
    }

    /// Constants plus `[x_i >= c]` and `[x_i < c]` for every feature and value.
    pub fn thresholds(space: impl Into<Arc<FeatureSpace>>) -> Result<Self> {
        let space = space.into();
        let mut members = vec![
            Hypothesis::constant(space.clone(), false),
            Hypothesis::constant(space.clone(), true),
        ];
        for i in 0..space.n() {
            for &c in space.values() {
                members.push(Hypothesis::threshold(space.clone(), i, c, false)?);
                members.push(Hypothesis::threshold(space.clone(), i, c, true)?);
            }
        }
        Self::new(space, members)
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.members.iter().any(|m| m == h)
    }

    pub fn union(classes: &[HypothesisClass]) -> Result<HypothesisClass> {
        let first = classes
            .first()
            .ok_or_else(|| Error::Parameter("union of no classes".into()))?;
        let members = classes.iter().flat_map(|c| c.members.clone()).collect();
        Self::new(first.space.clone(), members)
    }

    /// Keeps the members selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Hypothesis) -> bool) -> HypothesisClass {
        HypothesisClass {
            space: self.space.clone(),
            members: self.members.iter().filter(|h| keep(h)).cloned().collect(),
        }
    }

    pub fn with_member(&self, h: Hypothesis) -> Result<HypothesisClass> {
        let mut members = self.members.clone();
        members.push(h);
        Self::new(self.space.clone(), members)
    }
}

/// `Ĥ_k`: every `x -> h(x_{i(1)}, ..., x_{i(k)})` for `h` in `inner` (a class
/// over `S^k`) and distinct indices `i(1..k)` in `[n]`, deduplicated as
/// functions.
pub fn sparse_lift(inner: &HypothesisClass, n: usize) -> Result<HypothesisClass> {
    let k = inner.space.n();
    if k > n {
        return Err(Error::Arity(format!("cannot lift arity {k} to {n} features")));
    }
    let target = Arc::new(inner.space.restricted(n));
    let mut members = Vec::new();
    for indices in ordered_selections(n, k) {
        for h in &inner.members {
            members.push(h.lift(n, &indices)?);
        }
    }
    HypothesisClass::new(target, members)
}

/// All ordered lists of `k` distinct indices from `0..n`.
pub fn ordered_selections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// Symbolic hypothesis constructors as they appear in class files.
///
/// `all_functions` and `thresholds` expand to several members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HypothesisSpec {
    Constant {
        value: bool,
    },
    Dictator {
        feature: usize,
    },
    NegatedDictator {
        feature: usize,
    },
    Threshold {
        feature: usize,
        cutoff: Value,
        #[serde(default)]
        below: bool,
    },
    Xor {
        features: [usize; 2],
    },
    Grue {
        time: usize,
        emerald: usize,
        switch: Value,
    },
    /// Explicit truth table in lexicographic point order, entries 0 or 1.
    Table {
        table: Vec<u8>,
    },
    AllFunctions,
    Thresholds,
}

impl HypothesisSpec {
    pub fn expand(&self, space: &Arc<FeatureSpace>) -> Result<Vec<Hypothesis>> {
        let one = |h: Result<Hypothesis>| h.map(|h| vec![h]);
        match self {
            Self::Constant { value } => Ok(vec![Hypothesis::constant(space.clone(), *value)]),
            Self::Dictator { feature } => one(Hypothesis::dictator(space.clone(), *feature)),
            Self::NegatedDictator { feature } => {
                one(Hypothesis::negated_dictator(space.clone(), *feature))
            }
            Self::Threshold {
                feature,
                cutoff,
                below,
            } => one(Hypothesis::threshold(space.clone(), *feature, *cutoff, *below)),
            Self::Xor { features } => one(Hypothesis::xor(space.clone(), features[0], features[1])),
            Self::Grue {
                time,
                emerald,
                switch,
            } => one(Hypothesis::grue(space.clone(), *time, *emerald, *switch)),
            Self::Table { table } => {
                if let Some(bad) = table.iter().find(|&&b| b > 1) {
                    return Err(Error::Parse(format!("truth-table entry {bad} is not 0/1")));
                }
                let t: Vec<bool> = table.iter().map(|&b| b == 1).collect();
                one(Hypothesis::from_table(space.clone(), &t))
            }
            Self::AllFunctions => Ok(HypothesisClass::all_functions(space.clone())?.members),
            Self::Thresholds => Ok(HypothesisClass::thresholds(space.clone())?.members),
        }
    }

    /// Builds a spec that must denote exactly one hypothesis.
    pub fn build(&self, space: &Arc<FeatureSpace>) -> Result<Hypothesis> {
        let mut hs = self.expand(space)?;
        if hs.len() != 1 {
            return Err(Error::Parse(format!(
                "'{self:?}' denotes {} hypotheses, expected one",
                hs.len()
            )));
        }
        Ok(hs.remove(0))
    }
}

/// Wire form of a class: members over `S^n`, optionally lifted to
/// `lift_to` features with [`sparse_lift`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDoc {
    pub n: usize,
    pub values: Vec<Value>,
    pub members: Vec<HypothesisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_to: Option<usize>,
}

impl ClassDoc {
    pub fn build(&self) -> Result<HypothesisClass> {
        let space = Arc::new(FeatureSpace::new(self.n, self.values.clone())?);
        let mut members = Vec::new();
        for spec in &self.members {
            members.extend(spec.expand(&space)?);
        }
        let class = HypothesisClass::new(space, members)?;
        match self.lift_to {
            Some(n) => sparse_lift(&class, n),
            None => Ok(class),
        }
    }

    pub fn from_json(s: &str) -> Result<HypothesisClass> {
        serde_json::from_str::<ClassDoc>(s)?.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize) -> Arc<FeatureSpace> {
        Arc::new(FeatureSpace::binary(n).unwrap())
    }

    #[test]
    fn feat_of_constant_is_empty() {
        assert!(feat(&Hypothesis::constant(bits(3), true)).is_empty());
    }

    #[test]
    fn feat_of_xor() {
        let h = Hypothesis::xor(bits(3), 0, 1).unwrap();
        assert_eq!(feat(&h), vec![0, 1]);
    }

    #[test]
    fn feat_of_grue_uses_both_features() {
        let s = Arc::new(FeatureSpace::new(2, (0..16).collect()).unwrap());
        let h = Hypothesis::grue(s.clone(), 0, 1, 8).unwrap();
        assert_eq!(feat(&h), vec![0, 1]);
        let green = Hypothesis::dictator(s, 1).unwrap();
        assert_eq!(feat(&green), vec![1]);
    }

    #[test]
    fn feat_sees_dependence_away_from_the_first_value() {
        // Depends on x_0 only through values 1 vs 2.
        let s = Arc::new(FeatureSpace::new(2, vec![0, 1, 2]).unwrap());
        let h = Hypothesis::from_fn(s, |p| p.0[0] == 2).unwrap();
        assert_eq!(feat(&h), vec![0]);
    }

    #[test]
    fn negate_masks_padding() {
        let h = Hypothesis::constant(bits(2), false).negate();
        assert_eq!(h, Hypothesis::constant(bits(2), true));
    }

    #[test]
    fn lift_dictator_to_three_features() {
        let inner =
            HypothesisClass::new(bits(1), vec![Hypothesis::dictator(bits(1), 0).unwrap()])
                .unwrap();
        let lifted = sparse_lift(&inner, 3).unwrap();
        let expected: Vec<_> = (0..3)
            .map(|i| Hypothesis::dictator(bits(3), i).unwrap())
            .collect();
        assert_eq!(lifted.members(), expected.as_slice());
    }

    #[test]
    fn lift_of_constants_collapses() {
        let inner = HypothesisClass::new(
            bits(2),
            vec![
                Hypothesis::constant(bits(2), false),
                Hypothesis::constant(bits(2), true),
            ],
        )
        .unwrap();
        let lifted = sparse_lift(&inner, 4).unwrap();
        assert_eq!(lifted.len(), 2);
        assert!(lifted.members().iter().all(|h| feat(h).is_empty()));
    }

    #[test]
    fn full_arity_lift_contains_inner() {
        let inner = HypothesisClass::new(
            bits(2),
            vec![
                Hypothesis::xor(bits(2), 0, 1).unwrap(),
                Hypothesis::threshold(bits(2), 1, 1, false).unwrap(),
            ],
        )
        .unwrap();
        let lifted = sparse_lift(&inner, 2).unwrap();
        assert!(inner.members().iter().all(|h| lifted.contains(h)));
        assert!(matches!(sparse_lift(&inner, 1), Err(Error::Arity(_))));
    }

    #[test]
    fn class_dedups_functions() {
        let s = bits(1);
        let c = HypothesisClass::new(
            s.clone(),
            vec![
                Hypothesis::dictator(s.clone(), 0).unwrap(),
                Hypothesis::threshold(s.clone(), 0, 1, false).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(HypothesisClass::all_functions(bits(2)).unwrap().len(), 16);
        assert_eq!(HypothesisClass::thresholds(bits(1)).unwrap().len(), 4);
    }

    #[test]
    fn class_doc_parses_and_lifts() {
        let c = ClassDoc::from_json(
            r#"{"n":1,"values":[0,1],"members":[{"kind":"dictator","feature":0}],"lift_to":3}"#,
        )
        .unwrap();
        assert_eq!(c.len(), 3);
        let t = ClassDoc::from_json(
            r#"{"n":1,"values":[0,1],"members":[{"kind":"table","table":[1,0]},{"kind":"constant","value":true}]}"#,
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert!(ClassDoc::from_json(r#"{"n":1,"values":[0,1],"members":[{"kind":"table","table":[1]}]}"#).is_err());
        assert!(ClassDoc::from_json(r#"{"n":1,"values":[0,1],"members":[],"extra":0}"#).is_err());
    }
}
