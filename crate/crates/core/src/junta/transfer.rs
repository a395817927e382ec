//! Finite point-mass measures on rational vectors and the exact transfer check.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{exact_orthogonal_basis, project_exact};
use super::SubspaceJunta;
use crate::rational::{format_rational, serde_q, Q};
use crate::{Error, Result};

/// Canonical finite measure: atoms sorted, duplicates merged, zeros dropped,
/// probabilities summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MeasureDoc", into = "MeasureDoc")]
pub struct PointMassMeasure {
    dim: usize,
    atoms: Vec<(Vec<Q>, Q)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    atoms: Vec<MeasureAtom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureAtom {
    #[serde(with = "serde_q::vec")]
    point: Vec<Q>,
    #[serde(with = "serde_q")]
    p: Q,
}

impl TryFrom<MeasureDoc> for PointMassMeasure {
    type Error = Error;

    fn try_from(doc: MeasureDoc) -> Result<Self> {
        PointMassMeasure::new(doc.atoms.into_iter().map(|a| (a.point, a.p)).collect())
    }
}

impl From<PointMassMeasure> for MeasureDoc {
    fn from(m: PointMassMeasure) -> Self {
        MeasureDoc {
            atoms: m
                .atoms
                .into_iter()
                .map(|(point, p)| MeasureAtom { point, p })
                .collect(),
        }
    }
}

impl PointMassMeasure {
    pub fn new(atoms: Vec<(Vec<Q>, Q)>) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|(x, _)| x.len())
            .ok_or_else(|| Error::InvalidDistribution("measure has no atoms".into()))?;
        let mut merged: BTreeMap<Vec<Q>, Q> = BTreeMap::new();
        for (x, p) in atoms {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: x.len(),
                });
            }
            if p.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative mass {}",
                    format_rational(&p)
                )));
            }
            *merged.entry(x).or_insert_with(Q::zero) += p;
        }
        let total: Q = merged.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {}, not 1",
                format_rational(&total)
            )));
        }
        merged.retain(|_, p| !p.is_zero());
        Ok(Self {
            dim,
            atoms: merged.into_iter().collect(),
        })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(atoms: Vec<(Vec<Q>, Q)>) -> Result<Self> {
        let total: Q = atoms.iter().map(|(_, w)| w).sum();
        if !total.is_positive() {
            return Err(Error::InvalidDistribution("weights must have positive sum".into()));
        }
        Self::new(atoms.into_iter().map(|(x, w)| (x, w / &total)).collect())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measure serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(Vec<Q>, Q)] {
        &self.atoms
    }

    /// `m` independent draws.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R, m: usize) -> Vec<Vec<Q>> {
        let probs: Vec<&Q> = self.atoms.iter().map(|(_, p)| p).collect();
        crate::rng::weighted_indices(rng, &probs, m)
            .into_iter()
            .map(|i| self.atoms[i].0.clone())
            .collect()
    }

    /// Image measure under `map`.
    pub fn pushforward(&self, mut map: impl FnMut(&[Q]) -> Vec<Q>) -> Result<Self> {
        Self::new(self.atoms.iter().map(|(x, p)| (map(x), p.clone())).collect())
    }

    pub fn mass_where(&self, mut pred: impl FnMut(&[Q]) -> Result<bool>) -> Result<Q> {
        let mut total = Q::zero();
        for (x, p) in &self.atoms {
            if pred(x)? {
                total += p;
            }
        }
        Ok(total)
    }

    /// `Pr[h(x) = f(x)]`.
    pub fn agreement(&self, h: &SubspaceJunta, f: &SubspaceJunta) -> Result<Q> {
        self.mass_where(|x| Ok(h.evaluate(x)? == f.evaluate(x)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    /// `dim A` for `A = span(rows of W_h, rows of W_f)`.
    pub span_dim: usize,
    /// Whether `D` and `D'` push forward to the same measure under `P_A`.
    pub precondition_ok: bool,
    #[serde(with = "serde_q")]
    pub train_agreement: Q,
    #[serde(with = "serde_q")]
    pub test_agreement: Q,
    pub equal: bool,
}

impl TransferReport {
    /// Equality failed although the precondition held.
    pub fn is_violation(&self) -> bool {
        self.precondition_ok && !self.equal
    }
}

/// Compares `Pr_D[h = f]` with `Pr_D'[h = f]` exactly, after checking that
/// `D` and `D'` agree on the joint span of the two weight matrices.
pub fn transfer_identity_check(
    f: &SubspaceJunta,
    h: &SubspaceJunta,
    d: &PointMassMeasure,
    d_prime: &PointMassMeasure,
) -> Result<TransferReport> {
    for (what, got) in [("h", h.n()), ("D", d.dim()), ("D'", d_prime.dim())] {
        if got != f.n() {
            return Err(Error::DomainMismatch(format!(
                "{what} lives in dimension {got}, f in dimension {}",
                f.n()
            )));
        }
    }
    let rows: Vec<Vec<Q>> = f.w().iter().chain(h.w()).cloned().collect();
    let basis = exact_orthogonal_basis(&rows)?;
    let pa = d.pushforward(|x| project_exact(x, &basis))?;
    let pb = d_prime.pushforward(|x| project_exact(x, &basis))?;
    let train = d.agreement(h, f)?;
    let test = d_prime.agreement(h, f)?;
    Ok(TransferReport {
        span_dim: basis.len(),
        precondition_ok: pa == pb,
        equal: train == test,
        train_agreement: train,
        test_agreement: test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::junta::InnerFunction;
    use crate::rational::{q, qi};

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    fn halfspace(w: Vec<Vec<Q>>, weights: Vec<Q>, t: Q) -> SubspaceJunta {
        SubspaceJunta::new(w, InnerFunction::Halfspace { weights, threshold: t }).unwrap()
    }

    fn setup() -> (SubspaceJunta, SubspaceJunta, PointMassMeasure) {
        let f = halfspace(vec![v(&[1, 0, 0])], v(&[1]), qi(0));
        let h = halfspace(vec![v(&[1, 1, 0])], v(&[1]), q(1, 2));
        let d = PointMassMeasure::new(vec![
            (v(&[1, 0, 5]), q(1, 4)),
            (v(&[-1, 1, 0]), q(1, 4)),
            (v(&[0, -1, 2]), q(1, 4)),
            (v(&[2, -3, 1]), q(1, 4)),
        ])
        .unwrap();
        (f, h, d)
    }

    #[test]
    fn orthogonal_rerandomization_preserves_agreement() {
        let (f, h, d) = setup();
        let moved = d.pushforward(|x| vec![x[0].clone(), x[1].clone(), &x[2] * qi(-7) + qi(3)]).unwrap();
        let r = transfer_identity_check(&f, &h, &d, &moved).unwrap();
        assert_eq!(r.span_dim, 2);
        assert!(r.precondition_ok && r.equal && !r.is_violation());
        assert_eq!(r.train_agreement, r.test_agreement);
    }

    #[test]
    fn perturbed_span_component_is_rejected() {
        let (f, h, d) = setup();
        let moved = d.pushforward(|x| vec![&x[0] + qi(1), x[1].clone(), x[2].clone()]).unwrap();
        let r = transfer_identity_check(&f, &h, &d, &moved).unwrap();
        assert!(!r.precondition_ok);
        assert!(!r.is_violation());
    }

    #[test]
    fn self_agreement_is_one() {
        let (f, _, d) = setup();
        let r = transfer_identity_check(&f, &f, &d, &d).unwrap();
        assert_eq!(r.train_agreement, qi(1));
        assert_eq!(r.test_agreement, qi(1));
        assert_eq!(r.span_dim, 1);
    }

    #[test]
    fn measure_validation_and_json() {
        assert!(PointMassMeasure::new(vec![(v(&[1]), q(1, 2))]).is_err());
        assert!(PointMassMeasure::new(vec![(v(&[1]), qi(2)), (v(&[0]), qi(-1))]).is_err());
        assert!(PointMassMeasure::new(vec![(v(&[1]), q(1, 2)), (v(&[0, 1]), q(1, 2))]).is_err());
        let m = PointMassMeasure::new(vec![
            (v(&[1, 2]), q(1, 3)),
            (v(&[0, 0]), q(1, 3)),
            (v(&[1, 2]), q(1, 3)),
            (v(&[5, 5]), qi(0)),
        ])
        .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[1].1, q(2, 3));
        assert_eq!(PointMassMeasure::from_json(&m.to_json()).unwrap(), m);
    }
}
