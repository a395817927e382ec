//! Consistent-hypothesis enumeration over finite classes.

use num_traits::Zero;
use serde::Serialize;

use crate::distribution::{FiniteDistribution, StructuredPoint};
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::rational::{serde_q, Q};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledSample {
    pub point: StructuredPoint,
    pub label: bool,
}

/// Labels every point with the ground truth.
pub fn label_with(f: &Hypothesis, points: Vec<StructuredPoint>) -> Result<Vec<LabeledSample>> {
    points
        .into_iter()
        .map(|point| {
            let label = f.eval(&point)?;
            Ok(LabeledSample { point, label })
        })
        .collect()
}

/// Fails unless every label equals `f(point)`.
pub fn check_realizable(f: &Hypothesis, samples: &[LabeledSample]) -> Result<()> {
    for s in samples {
        if f.eval(&s.point)? != s.label {
            return Err(Error::Precondition(format!(
                "sample {} is labeled {} but the ground truth says {}",
                s.point,
                u8::from(s.label),
                u8::from(!s.label)
            )));
        }
    }
    Ok(())
}

fn is_consistent(h: &Hypothesis, samples: &[LabeledSample]) -> Result<bool> {
    for s in samples {
        if h.eval(&s.point)? != s.label {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Members agreeing with every sample label.
pub fn consistent_set(class: &HypothesisClass, samples: &[LabeledSample]) -> Result<HypothesisClass> {
    let mut keep = Vec::with_capacity(class.len());
    for h in class.members() {
        keep.push(is_consistent(h, samples)?);
    }
    let mut it = keep.into_iter();
    Ok(class.filter(|_| it.next().unwrap_or(false)))
}

/// `max_{h consistent} Pr_test[h != f]`, or 0 when nothing is consistent.
pub fn worst_consistent_ood_error(
    class: &HypothesisClass,
    samples: &[LabeledSample],
    f: &Hypothesis,
    test: &FiniteDistribution,
) -> Result<Q> {
    Ok(error_range(class, samples, f, test)?.map_or_else(Q::zero, |r| r.worst))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorRange {
    pub consistent: usize,
    #[serde(with = "serde_q")]
    pub best: Q,
    #[serde(with = "serde_q")]
    pub worst: Q,
}

/// Best and worst test error over the consistent set; `None` if it is empty.
pub fn error_range(
    class: &HypothesisClass,
    samples: &[LabeledSample],
    f: &Hypothesis,
    test: &FiniteDistribution,
) -> Result<Option<ErrorRange>> {
    let cons = consistent_set(class, samples)?;
    let mut range: Option<ErrorRange> = None;
    for h in cons.members() {
        let e = test.disagreement_probability(h, f)?;
        range = Some(match range {
            None => ErrorRange {
                consistent: 1,
                best: e.clone(),
                worst: e,
            },
            Some(r) => ErrorRange {
                consistent: r.consistent + 1,
                best: r.best.min(e.clone()),
                worst: r.worst.max(e),
            },
        });
    }
    Ok(range)
}

/// Precomputed view of a class for repeated consistency checks on one
/// space: member tables indexed by point index, and each member's error
/// under a fixed test distribution.
#[derive(Debug, Clone)]
pub struct ErmTable {
    members: Vec<Hypothesis>,
    errors: Vec<Q>,
}

impl ErmTable {
    pub fn new(class: &HypothesisClass, f: &Hypothesis, test: &FiniteDistribution) -> Result<Self> {
        let errors = class
            .members()
            .iter()
            .map(|h| test.disagreement_probability(h, f))
            .collect::<Result<_>>()?;
        Ok(Self {
            members: class.members().to_vec(),
            errors,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn all_alive(&self) -> Vec<bool> {
        vec![true; self.members.len()]
    }

    /// Removes members disagreeing with the labeled point at `index`.
    pub fn observe(&self, alive: &mut [bool], index: usize, label: bool) {
        for (a, h) in alive.iter_mut().zip(&self.members) {
            if *a && h.value_at(index) != label {
                *a = false;
            }
        }
    }

    pub fn range(&self, alive: &[bool]) -> Option<ErrorRange> {
        let errs: Vec<&Q> = self
            .errors
            .iter()
            .zip(alive)
            .filter_map(|(e, &a)| a.then_some(e))
            .collect();
        Some(ErrorRange {
            consistent: errs.len(),
            best: (*errs.iter().min()?).clone(),
            worst: (*errs.iter().max()?).clone(),
        })
    }
}
