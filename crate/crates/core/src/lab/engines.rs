//! Randomized exact checks of the transfer identities on small instances.
//!
//! Each instance owns the generator stream of its index, so reports do not
//! depend on scheduling. A per-hypothesis test distribution `D'` is built
//! for every consistent `h`, matching `D` on `A = Feat(h) ∪ Feat(f)`.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::erm::{consistent_set, label_with};
use crate::alpha::{alpha_exact, verify_alpha_contrapositive, AlphaQuery};
use crate::distribution::{complement, FeatureSpace, FiniteDistribution, StructuredPoint};
use crate::hypothesis::{feat, Hypothesis, HypothesisClass};
use crate::junta::linalg::{exact_orthogonal_basis, project_exact};
use crate::junta::{
    transfer_identity_check, InnerFunction, PointMassMeasure, Ptf, SubspaceJunta,
};
use crate::rational::{format_rational, from_f64, qi, Q};
use crate::rng::{trial_generator, Generator, GENERATOR_ID};
use crate::{Error, Result};

fn default_instances() -> usize {
    200
}
fn default_max_n() -> usize {
    5
}
fn default_max_values() -> usize {
    3
}
fn default_max_k() -> usize {
    2
}
fn default_max_support() -> usize {
    12
}
fn default_class_size() -> usize {
    16
}
fn default_sample_size() -> usize {
    4
}

/// Shape of the random finite instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceParams {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    #[serde(default = "default_max_values")]
    pub max_values: usize,
    #[serde(default = "default_max_k")]
    pub max_k: usize,
    #[serde(default = "default_max_support")]
    pub max_support: usize,
    #[serde(default = "default_class_size")]
    pub class_size: usize,
    #[serde(default = "default_sample_size")]
    pub sample_size: usize,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            instances: default_instances(),
            max_n: default_max_n(),
            max_values: default_max_values(),
            max_k: default_max_k(),
            max_support: default_max_support(),
            class_size: default_class_size(),
            sample_size: default_sample_size(),
        }
    }
}

impl InstanceParams {
    fn validate(&self) -> Result<()> {
        let ok = self.max_n >= 2
            && self.max_values >= 2
            && self.max_k >= 1
            && self.max_k <= self.max_n
            && self.max_support >= 1
            && self.class_size >= 1;
        if !ok {
            return Err(Error::Parameter(format!(
                "need max_n >= 2, max_values >= 2, 1 <= max_k <= max_n, max_support >= 1, class_size >= 1; got {self:?}"
            )));
        }
        let domain = (self.max_values as f64).powi(self.max_n as i32);
        if domain > 4096.0 {
            return Err(Error::SizeCap {
                what: "instance domain size",
                size: domain as usize,
                cap: 4096,
                hint: "; lower max_n or max_values",
            });
        }
        Ok(())
    }
}

/// One random realizable instance over a finite space.
#[derive(Debug, Clone)]
pub struct Instance {
    pub space: Arc<FeatureSpace>,
    pub train: FiniteDistribution,
    pub truth: Hypothesis,
    pub class: HypothesisClass,
    pub consistent: HypothesisClass,
}

fn random_weights(rng: &mut Generator, len: usize) -> Vec<Q> {
    (0..len).map(|_| qi(rng.random_range(1..=9))).collect()
}

/// A random distribution on `support.len()` distinct draws from `points`.
fn random_distribution(
    rng: &mut Generator,
    space: &FeatureSpace,
    points: &[StructuredPoint],
    max_support: usize,
) -> Result<FiniteDistribution> {
    let size = rng.random_range(1..=max_support.min(points.len()));
    let chosen = sample_indices(rng, points.len(), size);
    let weights = random_weights(rng, size);
    FiniteDistribution::from_weights(
        space.clone(),
        chosen.iter().zip(weights).map(|(i, w)| (points[i].clone(), w)).collect(),
    )
}

fn random_sparse(rng: &mut Generator, space: &Arc<FeatureSpace>, k: usize) -> Result<Hypothesis> {
    let inner_space = space.restricted(k);
    let size = inner_space.size().expect("small inner space");
    let table: Vec<bool> = (0..size).map(|_| rng.random()).collect();
    let inner = Hypothesis::from_table(inner_space, &table)?;
    let indices: Vec<usize> = sample_indices(rng, space.n(), k).into_vec();
    inner.lift(space.n(), &indices)
}

/// Draws a space, `D`, a `k`-sparse truth, a class of `k`-sparse members
/// containing it, and a labeled sample.
pub fn random_instance(rng: &mut Generator, p: &InstanceParams) -> Result<Instance> {
    let n = rng.random_range(2..=p.max_n);
    let s = rng.random_range(2..=p.max_values) as i64;
    let k = rng.random_range(1..=p.max_k.min(n));
    let space = Arc::new(FeatureSpace::new(n, (0..s).collect())?);
    let points = space.points()?;
    let train = random_distribution(rng, &space, &points, p.max_support)?;
    let truth = random_sparse(rng, &space, k)?;
    let mut members = vec![truth.clone()];
    for _ in 1..p.class_size {
        members.push(random_sparse(rng, &space, k)?);
    }
    let class = HypothesisClass::new(space.clone(), members)?;
    let samples = label_with(&truth, train.sample(rng, p.sample_size))?;
    let consistent = consistent_set(&class, &samples)?;
    Ok(Instance {
        space,
        train,
        truth,
        class,
        consistent,
    })
}

/// `A = Feat(h) ∪ Feat(f)`, ascending.
pub fn relevant_features(h: &Hypothesis, f: &Hypothesis) -> Vec<usize> {
    let mut a = feat(h);
    a.extend(feat(f));
    a.sort_unstable();
    a.dedup();
    a
}

/// `D'` with the given `A`-marginal and fresh random conditionals on the
/// remaining features.
pub fn rerandomize_conditionals(
    rng: &mut Generator,
    space: &FeatureSpace,
    features: &[usize],
    marginal: &FiniteDistribution,
    max_conditional_support: usize,
) -> Result<FiniteDistribution> {
    let rest = complement(features, space.n());
    let rest_space = space.restricted(rest.len());
    let rest_points = rest_space.points()?;
    let mut conditionals = Vec::with_capacity(marginal.len());
    for _ in 0..marginal.len() {
        conditionals.push(random_distribution(
            rng,
            &rest_space,
            &rest_points,
            max_conditional_support,
        )?);
    }
    let mut it = conditionals.into_iter();
    FiniteDistribution::compose(space, features, marginal, |_| it.next())
}

/// Fails with a precondition error unless `D'_A = D_A`.
pub fn check_marginal_match(
    d: &FiniteDistribution,
    d_prime: &FiniteDistribution,
    features: &[usize],
) -> Result<()> {
    if d.marginalize(features)? != d_prime.marginalize(features)? {
        return Err(Error::Precondition(format!(
            "D' does not match D on features {features:?}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineReport {
    pub version: &'static str,
    pub generator: &'static str,
    pub seed: u64,
    pub engine: &'static str,
    pub instances: usize,
    /// Hypothesis-level checks performed.
    pub checks: usize,
    pub violations: usize,
    /// Constructed test distributions the precondition checker rejected.
    pub precondition_rejections: usize,
    /// Checks for which the claim holds vacuously.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuous: Option<usize>,
    /// Smallest `Pr_D[h != f] - alpha` over non-vacuous checks, exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<String>,
    /// Smallest alpha seen, exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_alpha: Option<String>,
    /// Instances skipped because alpha fell below the configured floor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub below_alpha_floor: Option<usize>,
    /// Checks and violations of the class-level contrapositive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrapositive_checks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrapositive_violations: Option<usize>,
    /// Largest test error of a consistent candidate, exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_ood_error: Option<String>,
    pub first_violation: Option<String>,
}

impl EngineReport {
    fn new(engine: &'static str, seed: u64, instances: usize) -> Self {
        Self {
            version: crate::VERSION,
            generator: GENERATOR_ID,
            seed,
            engine,
            instances,
            checks: 0,
            violations: 0,
            precondition_rejections: 0,
            vacuous: None,
            min_margin: None,
            min_alpha: None,
            below_alpha_floor: None,
            contrapositive_checks: None,
            contrapositive_violations: None,
            worst_ood_error: None,
            first_violation: None,
        }
    }

    pub const CSV_HEADER: &'static str = "engine,instances,checks,violations,precondition_rejections,vacuous,min_margin,min_alpha,contrapositive_checks,contrapositive_violations,worst_ood_error";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let s = |v: &Option<String>| v.clone().unwrap_or_default();
        format!(
            "{}\n{},{},{},{},{},{},{},{},{},{},{}\n",
            Self::CSV_HEADER,
            self.engine,
            self.instances,
            self.checks,
            self.violations,
            self.precondition_rejections,
            opt(self.vacuous),
            s(&self.min_margin),
            s(&self.min_alpha),
            opt(self.contrapositive_checks),
            opt(self.contrapositive_violations),
            s(&self.worst_ood_error)
        )
    }
}

/// Per-instance tallies, merged in instance order.
#[derive(Debug, Default)]
struct Tally {
    checks: usize,
    violations: usize,
    rejections: usize,
    vacuous: usize,
    below_floor: usize,
    min_margin: Option<Q>,
    min_alpha: Option<Q>,
    worst: Option<Q>,
    contra_checks: usize,
    contra_violations: usize,
    first_violation: Option<String>,
}

fn min_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn max_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.checks += o.checks;
        self.violations += o.violations;
        self.rejections += o.rejections;
        self.vacuous += o.vacuous;
        self.below_floor += o.below_floor;
        self.min_margin = min_opt(self.min_margin, o.min_margin);
        self.min_alpha = min_opt(self.min_alpha, o.min_alpha);
        self.worst = max_opt(self.worst, o.worst);
        self.contra_checks += o.contra_checks;
        self.contra_violations += o.contra_violations;
        self.first_violation = self.first_violation.or(o.first_violation);
        self
    }
}

fn run_instances(
    instances: usize,
    seed: u64,
    body: impl Fn(usize, &mut Generator) -> Result<Tally> + Sync,
) -> Result<Tally> {
    let tallies: Vec<Tally> = (0..instances)
        .into_par_iter()
        .map(|i| body(i, &mut trial_generator(seed, i as u64)))
        .collect::<Result<_>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

const CONDITIONAL_SUPPORT: usize = 3;

/// Equality of train and test agreement whenever `D'_A = D_A`.
pub fn run_marginal_match(params: &InstanceParams, seed: u64) -> Result<EngineReport> {
    params.validate()?;
    let t = run_instances(params.instances, seed, |i, rng| {
        let inst = random_instance(rng, params)?;
        let mut t = Tally::default();
        for h in inst.consistent.members() {
            let a = relevant_features(h, &inst.truth);
            let d_a = inst.train.marginalize(&a)?;
            let d_prime = rerandomize_conditionals(rng, &inst.space, &a, &d_a, CONDITIONAL_SUPPORT)?;
            if check_marginal_match(&inst.train, &d_prime, &a).is_err() {
                t.rejections += 1;
                continue;
            }
            t.checks += 1;
            let train = inst.train.agreement_probability(h, &inst.truth)?;
            let test = d_prime.agreement_probability(h, &inst.truth)?;
            if train != test {
                t.violations += 1;
                t.first_violation.get_or_insert_with(|| {
                    format!(
                        "instance {i}: A = {a:?}, train {} != test {}",
                        format_rational(&train),
                        format_rational(&test)
                    )
                });
            }
        }
        Ok(t)
    })?;
    let mut r = EngineReport::new("marginal_match", seed, params.instances);
    r.checks = t.checks;
    r.violations = t.violations;
    r.precondition_rejections = t.rejections;
    r.first_violation = t.first_violation;
    Ok(r)
}

/// Shifted marginals: every consistent `h` with `Pr_D'[h != f] >= eps` must
/// have `Pr_D[h != f] >= alpha(D_A, D'_A, eps)`. Each instance also runs the
/// class-level contrapositive against an independent `D'` on the full space.
pub fn run_alpha_shift(
    params: &InstanceParams,
    epsilon: f64,
    min_alpha: f64,
    seed: u64,
) -> Result<EngineReport> {
    params.validate()?;
    let eps = from_f64(epsilon)?;
    let floor = from_f64(min_alpha)?;
    let t = run_instances(params.instances, seed, |i, rng| {
        let inst = random_instance(rng, params)?;
        let mut t = Tally::default();
        for h in inst.consistent.members() {
            let a = relevant_features(h, &inst.truth);
            let d_a = inst.train.marginalize(&a)?;
            let support: Vec<StructuredPoint> = d_a.support().cloned().collect();
            let weights = random_weights(rng, support.len());
            let shifted = FiniteDistribution::from_weights(
                d_a.space().clone(),
                support.into_iter().zip(weights).collect(),
            )?;
            let alpha = alpha_exact(&AlphaQuery::new(&d_a, &shifted, eps.clone())?)?.value;
            t.min_alpha = min_opt(t.min_alpha.take(), Some(alpha.clone()));
            if alpha < floor {
                t.below_floor += 1;
                continue;
            }
            let d_prime =
                rerandomize_conditionals(rng, &inst.space, &a, &shifted, CONDITIONAL_SUPPORT)?;
            if d_prime.marginalize(&a)? != shifted {
                t.rejections += 1;
                continue;
            }
            let test_err = d_prime.disagreement_probability(h, &inst.truth)?;
            if test_err < eps {
                t.vacuous += 1;
                continue;
            }
            t.checks += 1;
            let train_err = inst.train.disagreement_probability(h, &inst.truth)?;
            let margin = &train_err - &alpha;
            if margin < Q::zero() {
                t.violations += 1;
                t.first_violation.get_or_insert_with(|| {
                    format!(
                        "instance {i}: train error {} < alpha {}",
                        format_rational(&train_err),
                        format_rational(&alpha)
                    )
                });
            }
            t.min_margin = min_opt(t.min_margin.take(), Some(margin));
        }
        let points = inst.space.points()?;
        let other = random_distribution(rng, &inst.space, &points, params.max_support)?;
        let report =
            verify_alpha_contrapositive(&inst.train, &other, &inst.truth, &inst.class, eps.clone())?;
        t.contra_checks += report.checked;
        t.contra_violations += report.violations.len();
        if let Some(v) = report.violations.first() {
            t.first_violation.get_or_insert_with(|| {
                format!("instance {i}: contrapositive fails for member {}", v.member)
            });
        }
        Ok(t)
    })?;
    let mut r = EngineReport::new("alpha_shift", seed, params.instances);
    r.checks = t.checks;
    r.violations = t.violations + t.contra_violations;
    r.precondition_rejections = t.rejections;
    r.vacuous = Some(t.vacuous);
    r.min_margin = t.min_margin.as_ref().map(format_rational);
    r.min_alpha = t.min_alpha.as_ref().map(format_rational);
    r.below_alpha_floor = Some(t.below_floor);
    r.contrapositive_checks = Some(t.contra_checks);
    r.contrapositive_violations = Some(t.contra_violations);
    r.first_violation = t.first_violation;
    Ok(r)
}

fn default_dictionary_size() -> usize {
    50
}
fn default_transfer_n() -> usize {
    4
}
fn default_transfer_support() -> usize {
    8
}
fn default_transfer_samples() -> usize {
    6
}

/// Shape of the random subspace-junta instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceParams {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_transfer_n")]
    pub max_n: usize,
    #[serde(default = "default_max_k")]
    pub max_k: usize,
    #[serde(default = "default_dictionary_size")]
    pub dictionary_size: usize,
    #[serde(default = "default_transfer_support")]
    pub max_support: usize,
    #[serde(default = "default_transfer_samples")]
    pub sample_size: usize,
}

impl Default for SubspaceParams {
    fn default() -> Self {
        Self {
            instances: 100,
            max_n: default_transfer_n(),
            max_k: default_max_k(),
            dictionary_size: default_dictionary_size(),
            max_support: default_transfer_support(),
            sample_size: default_transfer_samples(),
        }
    }
}

fn small_int(rng: &mut Generator, r: i64) -> Q {
    qi(rng.random_range(-r..=r))
}

/// A random junta with small integer weights and a halfspace or
/// quadratic PTF inner function.
pub fn random_junta(rng: &mut Generator, n: usize, max_k: usize) -> Result<SubspaceJunta> {
    let k = rng.random_range(1..=max_k.min(n));
    let mut w = Vec::with_capacity(k);
    while w.len() < k {
        let row: Vec<Q> = (0..n).map(|_| small_int(rng, 2)).collect();
        if row.iter().any(|x| !x.is_zero()) {
            w.push(row);
        }
    }
    let inner = if rng.random_bool(0.5) {
        InnerFunction::Halfspace {
            weights: (0..k).map(|_| small_int(rng, 2)).collect(),
            threshold: small_int(rng, 2),
        }
    } else {
        let mut terms = Vec::new();
        for a in 0..=2u32 {
            for b in 0..=(2 - a) {
                let mut e = vec![0u32; k];
                e[0] = a;
                if k > 1 {
                    e[1] = b;
                } else if b > 0 {
                    continue;
                }
                terms.push((e, small_int(rng, 2)));
            }
        }
        InnerFunction::Ptf {
            ptf: Ptf::new(k, 2, terms)?,
        }
    };
    SubspaceJunta::new(w, inner)
}

/// `P_A x + (z - P_A z)` with a fresh integer `z` per atom.
pub fn rerandomize_orthogonal(
    rng: &mut Generator,
    d: &PointMassMeasure,
    basis: &[Vec<Q>],
) -> Result<PointMassMeasure> {
    d.pushforward(|x| {
        let z: Vec<Q> = x.iter().map(|_| small_int(rng, 3)).collect();
        let pz = project_exact(&z, basis);
        project_exact(x, basis)
            .into_iter()
            .zip(z.into_iter().zip(pz))
            .map(|(a, (zi, pzi))| a + zi - pzi)
            .collect()
    })
}

/// Exact transfer over a dictionary of random juntas containing the truth.
pub fn run_subspace_transfer(params: &SubspaceParams, seed: u64) -> Result<EngineReport> {
    if params.max_n < 1 || params.max_k < 1 || params.dictionary_size < 1 || params.max_support < 1 {
        return Err(Error::Parameter(format!("invalid subspace parameters {params:?}")));
    }
    let t = run_instances(params.instances, seed, |i, rng| {
        let n = rng.random_range(1..=params.max_n);
        let f = random_junta(rng, n, params.max_k)?;
        let mut dictionary = vec![f.clone()];
        while dictionary.len() < params.dictionary_size {
            dictionary.push(random_junta(rng, n, params.max_k)?);
        }
        let size = rng.random_range(1..=params.max_support);
        let atoms: Vec<(Vec<Q>, Q)> = (0..size)
            .map(|_| ((0..n).map(|_| small_int(rng, 3)).collect(), qi(rng.random_range(1..=9))))
            .collect();
        let d = PointMassMeasure::from_weights(atoms)?;
        let samples = d.sample(rng, params.sample_size);
        let mut t = Tally::default();
        for h in &dictionary {
            let mut consistent = true;
            for x in &samples {
                if h.evaluate(x)? != f.evaluate(x)? {
                    consistent = false;
                    break;
                }
            }
            if !consistent {
                continue;
            }
            let rows: Vec<Vec<Q>> = f.w().iter().chain(h.w()).cloned().collect();
            let basis = exact_orthogonal_basis(&rows)?;
            let d_prime = rerandomize_orthogonal(rng, &d, &basis)?;
            let r = transfer_identity_check(&f, h, &d, &d_prime)?;
            if !r.precondition_ok {
                t.rejections += 1;
                continue;
            }
            t.checks += 1;
            t.worst = max_opt(t.worst.take(), Some(Q::one() - &r.test_agreement));
            if r.is_violation() {
                t.violations += 1;
                t.first_violation.get_or_insert_with(|| {
                    format!(
                        "instance {i}: train {} != test {}",
                        format_rational(&r.train_agreement),
                        format_rational(&r.test_agreement)
                    )
                });
            }
        }
        Ok(t)
    })?;
    let mut r = EngineReport::new("subspace_transfer", seed, params.instances);
    r.checks = t.checks;
    r.violations = t.violations;
    r.precondition_rejections = t.rejections;
    r.worst_ood_error = t.worst.as_ref().map(format_rational);
    r.first_violation = t.first_violation;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::generator;

    fn small(instances: usize) -> InstanceParams {
        InstanceParams {
            instances,
            ..InstanceParams::default()
        }
    }

    #[test]
    fn identical_test_distribution_passes_the_checker() {
        let mut rng = generator(1);
        let inst = random_instance(&mut rng, &small(1)).unwrap();
        let a = relevant_features(&inst.consistent.members()[0], &inst.truth);
        check_marginal_match(&inst.train, &inst.train, &a).unwrap();
    }

    #[test]
    fn adversarial_shift_is_refused() {
        let space = FeatureSpace::binary(2).unwrap();
        let pt = |v: &[i64]| StructuredPoint::new(v.to_vec());
        let d = FiniteDistribution::uniform(space.clone(), vec![pt(&[0, 0]), pt(&[1, 1])]).unwrap();
        let moved = FiniteDistribution::uniform(space, vec![pt(&[0, 0]), pt(&[0, 1])]).unwrap();
        assert!(check_marginal_match(&d, &moved, &[1]).is_ok());
        assert!(matches!(
            check_marginal_match(&d, &moved, &[0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rerandomized_conditionals_keep_the_marginal() {
        let mut rng = generator(5);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, &small(1)).unwrap();
            let a = vec![0];
            let d_a = inst.train.marginalize(&a).unwrap();
            let dp = rerandomize_conditionals(&mut rng, &inst.space, &a, &d_a, 3).unwrap();
            assert_eq!(dp.marginalize(&a).unwrap(), d_a);
        }
    }

    #[test]
    fn marginal_match_small_run() {
        let r = run_marginal_match(&small(30), 11).unwrap();
        assert!(r.checks > 0);
        assert_eq!((r.violations, r.precondition_rejections), (0, 0));
        assert_eq!(r, run_marginal_match(&small(30), 11).unwrap());
    }

    #[test]
    fn alpha_shift_small_run() {
        let r = run_alpha_shift(&small(30), 0.3, 0.0, 12).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.checks + r.vacuous.unwrap() > 0);
    }

    #[test]
    fn alpha_shift_above_every_error_is_vacuous() {
        let r = run_alpha_shift(&small(10), 1.0, 0.0, 3).unwrap();
        assert_eq!(r.checks, 0);
        assert!(r.vacuous.unwrap() > 0);
    }

    #[test]
    fn subspace_small_run() {
        let p = SubspaceParams {
            instances: 10,
            ..SubspaceParams::default()
        };
        let r = run_subspace_transfer(&p, 4).unwrap();
        assert!(r.checks >= 10);
        assert_eq!((r.violations, r.precondition_rejections), (0, 0));
    }

    #[test]
    fn perturbing_the_span_component_is_rejected() {
        let mut rng = generator(8);
        let f = random_junta(&mut rng, 3, 2).unwrap();
        let d = PointMassMeasure::new(vec![
            (vec![qi(1), qi(0), qi(2)], Q::one() / qi(2)),
            (vec![qi(-1), qi(1), qi(0)], Q::one() / qi(2)),
        ])
        .unwrap();
        let basis = exact_orthogonal_basis(f.w()).unwrap();
        let b0 = basis[0].clone();
        let moved = d
            .pushforward(|x| x.iter().zip(&b0).map(|(a, b)| a + b).collect())
            .unwrap();
        let r = transfer_identity_check(&f, &f, &d, &moved).unwrap();
        assert!(!r.precondition_ok);
    }

    #[test]
    fn planted_truth_pinned_by_samples_has_zero_error() {
        let mut rng = generator(2);
        let f = random_junta(&mut rng, 2, 1).unwrap();
        let d = PointMassMeasure::new(vec![(vec![qi(1), qi(1)], Q::one())]).unwrap();
        let basis = exact_orthogonal_basis(f.w()).unwrap();
        let dp = rerandomize_orthogonal(&mut rng, &d, &basis).unwrap();
        let r = transfer_identity_check(&f, &f, &d, &dp).unwrap();
        assert_eq!(Q::one() - r.test_agreement, Q::zero());
    }
}
