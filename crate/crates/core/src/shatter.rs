//! Shattering, exact VC-dimension and Sauer's-Lemma counts.
//!
//! Labelings of `m` points are encoded as integers with the first point in
//! the most significant bit, so numeric order is lexicographic order on
//! label tuples.

use num_bigint::BigUint;
use num_integer::binomial;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::StructuredPoint;
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::{Error, Result};

/// Default cap on the number of points handed to [`shatters`].
pub const DEFAULT_POINT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShatterCertificate {
    pub points: Vec<StructuredPoint>,
    /// `realizers[labeling]` is the index of a class member producing it.
    pub realizers: Vec<usize>,
}

impl ShatterCertificate {
    /// Re-checks every labeling against the class.
    pub fn verify(&self, class: &HypothesisClass) -> Result<bool> {
        let m = self.points.len();
        if self.realizers.len() != 1 << m {
            return Ok(false);
        }
        for (labeling, &idx) in self.realizers.iter().enumerate() {
            let Some(h) = class.members().get(idx) else {
                return Ok(false);
            };
            for (j, p) in self.points.iter().enumerate() {
                if h.eval(p)? != label_of(labeling, j, m) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ShatterOutcome {
    Shattered(ShatterCertificate),
    /// The lexicographically first labeling no member realizes.
    Refuted { labeling: Vec<bool> },
}

impl ShatterOutcome {
    pub fn is_shattered(&self) -> bool {
        matches!(self, Self::Shattered(_))
    }
}

/// Label of point `j` in `labeling` over `m` points.
pub fn label_of(labeling: usize, j: usize, m: usize) -> bool {
    labeling >> (m - 1 - j) & 1 == 1
}

pub fn labeling_bits(labeling: usize, m: usize) -> Vec<bool> {
    (0..m).map(|j| label_of(labeling, j, m)).collect()
}

#[inline]
fn signature(h: &Hypothesis, idxs: &[usize]) -> usize {
    idxs.iter()
        .fold(0usize, |acc, &i| acc << 1 | h.value_at(i) as usize)
}

fn point_indices(class: &HypothesisClass, points: &[StructuredPoint]) -> Result<Vec<usize>> {
    let mut idxs = Vec::with_capacity(points.len());
    for p in points {
        let i = class
            .space()
            .index_of(p)
            .ok_or_else(|| Error::DomainMismatch(p.to_string()))?;
        if idxs.contains(&i) {
            return Err(Error::Parameter(format!("duplicate point {p}")));
        }
        idxs.push(i);
    }
    Ok(idxs)
}

fn realized(class: &HypothesisClass, idxs: &[usize]) -> Vec<Option<usize>> {
    let mut seen = vec![None; 1 << idxs.len()];
    for (k, h) in class.members().iter().enumerate() {
        let s = signature(h, idxs);
        if seen[s].is_none() {
            seen[s] = Some(k);
        }
    }
    seen
}

fn is_shattered(class: &HypothesisClass, idxs: &[usize]) -> bool {
    let need = 1usize << idxs.len();
    if class.len() < need {
        return false;
    }
    let mut seen = vec![false; need];
    let mut count = 0;
    for h in class.members() {
        let s = signature(h, idxs);
        if !seen[s] {
            seen[s] = true;
            count += 1;
            if count == need {
                return true;
            }
        }
    }
    false
}

/// Decides whether `class` shatters `points`, with the default cap.
pub fn shatters(class: &HypothesisClass, points: &[StructuredPoint]) -> Result<ShatterOutcome> {
    shatters_capped(class, points, DEFAULT_POINT_CAP)
}

pub fn shatters_capped(
    class: &HypothesisClass,
    points: &[StructuredPoint],
    cap: usize,
) -> Result<ShatterOutcome> {
    if points.len() > cap {
        return Err(Error::SizeCap {
            what: "point set",
            size: points.len(),
            cap,
            hint: "",
        });
    }
    let idxs = point_indices(class, points)?;
    let seen = realized(class, &idxs);
    match seen.iter().position(Option::is_none) {
        Some(labeling) => Ok(ShatterOutcome::Refuted {
            labeling: labeling_bits(labeling, points.len()),
        }),
        None => Ok(ShatterOutcome::Shattered(ShatterCertificate {
            points: points.to_vec(),
            realizers: seen.into_iter().map(|s| s.expect("all realized")).collect(),
        })),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VcDimension {
    Exact {
        dim: usize,
        witness: ShatterCertificate,
    },
    /// A shattered set of size `cap + 1` was found; the search stopped.
    Capped {
        at_least: usize,
        witness: ShatterCertificate,
    },
}

impl VcDimension {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Self::Exact { dim, .. } => Some(*dim),
            Self::Capped { .. } => None,
        }
    }

    pub fn lower_bound(&self) -> usize {
        match self {
            Self::Exact { dim, .. } => *dim,
            Self::Capped { at_least, .. } => *at_least,
        }
    }

    pub fn witness(&self) -> &ShatterCertificate {
        match self {
            Self::Exact { witness, .. } | Self::Capped { witness, .. } => witness,
        }
    }
}

/// Exact VC-dimension over the whole domain, searching set sizes up to `cap + 1`.
pub fn vc_dimension_exact(class: &HypothesisClass, cap: usize) -> Result<VcDimension> {
    let all: Vec<usize> = (0..class.space().size().unwrap_or(0)).collect();
    vc_search(class, &all, cap)
}

/// VC-dimension of `class` restricted to `points`.
pub fn vc_dimension_on(
    class: &HypothesisClass,
    points: &[StructuredPoint],
    cap: usize,
) -> Result<VcDimension> {
    let idxs = point_indices(class, points)?;
    vc_search(class, &idxs, cap)
}

/// Level-wise search over shattered sets.
///
/// Shattering is hereditary, so level `s + 1` only extends shattered sets of
/// level `s`, and the search stops at the first empty level. The number of
/// shattered sets never exceeds `|class|`. Points with a constant column are
/// dropped and points whose column repeats an earlier one are merged, since
/// neither can appear in (or add to) a shattered set.
fn vc_search(class: &HypothesisClass, candidates: &[usize], cap: usize) -> Result<VcDimension> {
    if class.is_empty() {
        return Err(Error::Parameter("the empty class shatters nothing".into()));
    }
    let space = class.space();
    let to_points = |idxs: &[usize]| idxs.iter().map(|&i| space.point_at(i)).collect::<Vec<_>>();
    let certificate = |idxs: &[usize]| ShatterCertificate {
        points: to_points(idxs),
        realizers: realized(class, idxs)
            .into_iter()
            .map(|s| s.expect("shattered"))
            .collect(),
    };

    let mut columns: Vec<Vec<bool>> = Vec::new();
    let mut pool: Vec<usize> = Vec::new();
    for &i in candidates {
        let col: Vec<bool> = class.members().iter().map(|h| h.value_at(i)).collect();
        let constant = col.iter().all(|&b| b == col[0]);
        if !constant && !columns.contains(&col) {
            columns.push(col);
            pool.push(i);
        }
    }

    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut size = 0;
    loop {
        if size > cap {
            return Ok(VcDimension::Capped {
                at_least: size,
                witness: certificate(&level[0]),
            });
        }
        if class.len() < 1 << (size + 1) {
            break;
        }
        let next: Vec<Vec<usize>> = level
            .par_iter()
            .flat_map_iter(|set| {
                let start = set
                    .last()
                    .map(|&last| pool.iter().position(|&p| p == last).expect("pooled") + 1)
                    .unwrap_or(0);
                pool[start..]
                    .iter()
                    .filter_map(|&p| {
                        let mut ext = set.clone();
                        ext.push(p);
                        is_shattered(class, &ext).then_some(ext)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        if next.is_empty() {
            break;
        }
        level = next;
        size += 1;
    }
    Ok(VcDimension::Exact {
        dim: size,
        witness: certificate(&level[0]),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SauerReport {
    pub domain_size: usize,
    pub distinct_restrictions: usize,
    pub vc_dimension: usize,
    /// `sum_{i <= vc} C(domain_size, i)`.
    #[serde(serialize_with = "crate::rational::serialize_display")]
    pub sauer_bound: BigUint,
    pub holds: bool,
}

/// Checks `|H| <= sum_{i <= VC(H)} C(n, i)` over the full domain of size `n`.
pub fn sauer_check(class: &HypothesisClass, cap: usize) -> Result<SauerReport> {
    let all: Vec<StructuredPoint> = class.space().points()?;
    sauer_check_on(class, &all, cap)
}

/// Sauer's inequality for the restrictions of `class` to `points`.
pub fn sauer_check_on(
    class: &HypothesisClass,
    points: &[StructuredPoint],
    cap: usize,
) -> Result<SauerReport> {
    let vc = vc_dimension_on(class, points, cap)?;
    let dim = vc.exact().ok_or(Error::SizeCap {
        what: "VC-dimension search",
        size: vc.lower_bound(),
        cap,
        hint: "",
    })?;
    let idxs = point_indices(class, points)?;
    let mut restrictions: Vec<Vec<bool>> = class
        .members()
        .iter()
        .map(|h| idxs.iter().map(|&i| h.value_at(i)).collect())
        .collect();
    restrictions.sort();
    restrictions.dedup();
    let n = BigUint::from(points.len());
    let bound: BigUint = (0..=dim)
        .map(|i| binomial(n.clone(), BigUint::from(i)))
        .sum();
    Ok(SauerReport {
        domain_size: points.len(),
        distinct_restrictions: restrictions.len(),
        vc_dimension: dim,
        holds: BigUint::from(restrictions.len()) <= bound,
        sauer_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::FeatureSpace;
    use crate::hypothesis::sparse_lift;
    use std::sync::Arc;

    fn bits(n: usize) -> Arc<FeatureSpace> {
        Arc::new(FeatureSpace::binary(n).unwrap())
    }

    fn dictators3() -> HypothesisClass {
        HypothesisClass::new(
            bits(3),
            (0..3).map(|i| Hypothesis::dictator(bits(3), i).unwrap()).collect(),
        )
        .unwrap()
    }

    fn pt(c: &[i64]) -> StructuredPoint {
        StructuredPoint(c.to_vec())
    }

    #[test]
    fn empty_set_is_shattered() {
        let out = shatters(&dictators3(), &[]).unwrap();
        assert!(out.is_shattered());
    }

    #[test]
    fn full_class_shatters_its_domain() {
        let c = HypothesisClass::all_functions(bits(1)).unwrap();
        let out = shatters(&c, &[pt(&[0]), pt(&[1])]).unwrap();
        let ShatterOutcome::Shattered(cert) = out else {
            panic!("expected shattering")
        };
        assert!(cert.verify(&c).unwrap());
    }

    #[test]
    fn dictators_do_not_shatter_opposite_corners() {
        let out = shatters(&dictators3(), &[pt(&[0, 0, 0]), pt(&[1, 1, 1])]).unwrap();
        // Every dictator labels the pair (0,1); the first gap in lex order
        // is (0,0), and (1,0) is unrealizable too.
        assert_eq!(
            out,
            ShatterOutcome::Refuted {
                labeling: vec![false, false]
            }
        );
        let c = dictators3();
        assert!(!c.members().iter().any(|h| h.eval(&pt(&[0, 0, 0])).unwrap()
            && !h.eval(&pt(&[1, 1, 1])).unwrap()));
    }

    #[test]
    fn shatter_cap_is_an_error() {
        let c = dictators3();
        let pts = bits(3).points().unwrap();
        assert!(matches!(
            shatters_capped(&c, &pts, 4),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn singleton_class_has_dimension_zero() {
        let c = HypothesisClass::new(bits(2), vec![Hypothesis::xor(bits(2), 0, 1).unwrap()])
            .unwrap();
        assert_eq!(vc_dimension_exact(&c, 10).unwrap().exact(), Some(0));
    }

    #[test]
    fn lifted_dictators_have_dimension_one() {
        let inner =
            HypothesisClass::new(bits(1), vec![Hypothesis::dictator(bits(1), 0).unwrap()])
                .unwrap();
        let lifted = sparse_lift(&inner, 3).unwrap();
        let vc = vc_dimension_exact(&lifted, 10).unwrap();
        assert_eq!(vc.exact(), Some(1));
        assert!(vc.witness().verify(&lifted).unwrap());
    }

    #[test]
    fn full_class_dimension_is_domain_size() {
        for n in 1..=2 {
            let c = HypothesisClass::all_functions(bits(n)).unwrap();
            assert_eq!(vc_dimension_exact(&c, 10).unwrap().exact(), Some(1 << n));
        }
    }

    #[test]
    fn capped_search_reports_lower_bound() {
        let c = HypothesisClass::all_functions(bits(2)).unwrap();
        let vc = vc_dimension_exact(&c, 2).unwrap();
        assert_eq!(vc, VcDimension::Capped { at_least: 3, witness: vc.witness().clone() });
        assert!(vc.witness().verify(&c).unwrap());
    }

    #[test]
    fn sauer_on_full_class_is_tight() {
        let c = HypothesisClass::all_functions(bits(2)).unwrap();
        let r = sauer_check(&c, 10).unwrap();
        assert_eq!(r.distinct_restrictions, 16);
        assert_eq!(r.sauer_bound, BigUint::from(16u32));
        assert!(r.holds);
    }

    #[test]
    fn sauer_on_dictators() {
        let r = sauer_check(&dictators3(), 10).unwrap();
        assert_eq!(
            (r.distinct_restrictions, r.vc_dimension, r.sauer_bound.clone()),
            (3, 1, BigUint::from(9u32))
        );
        assert!(r.holds);
    }
}
