//! The probability-amplification functional
//! `alpha_{D,D'}(eps) = inf { Pr_D[E] : Pr_{D'}[E] >= eps }`.
//!
//! Over finite distributions the infimum is a minimum over deterministic
//! subsets of atoms: a 0/1 knapsack with costs `Pr_D(x)` and weights
//! `Pr_{D'}(x)`. [`alpha_exact`] solves it exactly; [`alpha_bounds`] gives the
//! fractional relaxation and the matching greedy subset.
//!
//! The exact solver groups atoms into dominance chains. Atom `a` dominates
//! `b` when `cost(a) <= cost(b)` and `weight(a) >= weight(b)`; some optimal
//! event then takes a prefix of every chain, so only per-chain counts are
//! searched. The size cap is measured in binary atoms,
//! `sum_chains log2(len + 1)`, which equals the atom count when no atom
//! dominates another.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::distribution::{FiniteDistribution, StructuredPoint};
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::rational::{format_rational, in_unit_interval, Q};
use crate::{Error, Result};

/// Default size cap for [`alpha_exact`], in binary atoms.
pub const DEFAULT_SIZE_CAP: u32 = 22;

#[derive(Debug, Clone)]
pub struct AlphaQuery<'a> {
    pub train: &'a FiniteDistribution,
    pub test: &'a FiniteDistribution,
    pub epsilon: Q,
}

impl<'a> AlphaQuery<'a> {
    pub fn new(train: &'a FiniteDistribution, test: &'a FiniteDistribution, epsilon: Q) -> Result<Self> {
        if train.space() != test.space() {
            return Err(Error::Parameter(
                "D and D' must share a feature space".into(),
            ));
        }
        if !in_unit_interval(&epsilon) {
            return Err(Error::Parameter(format!(
                "epsilon {} is outside [0, 1]",
                format_rational(&epsilon)
            )));
        }
        Ok(Self { train, test, epsilon })
    }

    /// Atoms of either support with `(point, Pr_D, Pr_D')`, in point order.
    fn items(&self) -> Vec<Item> {
        let (a, b) = (self.train.atoms(), self.test.atoms());
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (point, cost, weight) = match ord {
                Ordering::Less => {
                    i += 1;
                    (a[i - 1].0.clone(), a[i - 1].1.clone(), Q::zero())
                }
                Ordering::Greater => {
                    j += 1;
                    (b[j - 1].0.clone(), Q::zero(), b[j - 1].1.clone())
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0.clone(), a[i - 1].1.clone(), b[j - 1].1.clone())
                }
            };
            out.push(Item { point, cost, weight });
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Item {
    point: StructuredPoint,
    cost: Q,
    weight: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMethod {
    Exact,
    GreedyBounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub value: Q,
    /// Points of a minimizing event.
    pub witness: Vec<StructuredPoint>,
    pub method: AlphaMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaBounds {
    /// Fractional-relaxation optimum.
    pub lower: Q,
    /// Cost of the greedy event, which is feasible.
    pub upper: Q,
    pub greedy_event: Vec<StructuredPoint>,
}

/// Splits off the forced part of every optimal event: atoms with
/// `Pr_D' = 0` are dropped, atoms with `Pr_D = 0 < Pr_D'` are always taken.
fn presolve(items: Vec<Item>) -> (Vec<StructuredPoint>, Q, Vec<Item>) {
    let mut forced = Vec::new();
    let mut forced_weight = Q::zero();
    let mut rest = Vec::new();
    for it in items {
        if it.weight.is_zero() {
            continue;
        }
        if it.cost.is_zero() {
            forced_weight += &it.weight;
            forced.push(it.point);
        } else {
            rest.push(it);
        }
    }
    (forced, forced_weight, rest)
}

/// Fractional relaxation and greedy subset, filling mass `eps` by ascending
/// `Pr_D / Pr_D'`.
pub fn alpha_bounds(q: &AlphaQuery<'_>) -> AlphaBounds {
    let mut items: Vec<Item> = q.items().into_iter().filter(|it| !it.weight.is_zero()).collect();
    // cost_a / weight_a < cost_b / weight_b, cross-multiplied.
    items.sort_by(|a, b| {
        (&a.cost * &b.weight)
            .cmp(&(&b.cost * &a.weight))
            .then_with(|| a.point.cmp(&b.point))
    });
    let mut lower = Q::zero();
    let mut upper = Q::zero();
    let mut filled = Q::zero();
    let mut event = Vec::new();
    for it in items {
        if filled >= q.epsilon {
            break;
        }
        let remaining = &q.epsilon - &filled;
        if it.weight <= remaining {
            lower += &it.cost;
        } else {
            lower += &it.cost * &remaining / &it.weight;
        }
        upper += &it.cost;
        filled += &it.weight;
        event.push(it.point);
    }
    event.sort();
    AlphaBounds {
        lower,
        upper,
        greedy_event: event,
    }
}

/// Chains of mutually comparable items, each ordered from dominant to
/// dominated, built by best-fit patience sorting on `(cost asc, weight desc)`.
fn dominance_chains(mut items: Vec<Item>, cap: u32) -> Result<Vec<Vec<Item>>> {
    items.sort_by(|a, b| {
        a.cost
            .cmp(&b.cost)
            .then_with(|| b.weight.cmp(&a.weight))
            .then_with(|| a.point.cmp(&b.point))
    });
    let total = items.len();
    let mut chains: Vec<Vec<Item>> = Vec::new();
    for it in items {
        // Chain whose tail weight is the smallest one still >= it.weight.
        let slot = chains
            .iter()
            .enumerate()
            .filter(|(_, c)| c.last().expect("nonempty").weight >= it.weight)
            .min_by(|(_, x), (_, y)| {
                x.last().expect("nonempty").weight.cmp(&y.last().expect("nonempty").weight)
            })
            .map(|(i, _)| i);
        match slot {
            Some(i) => chains[i].push(it),
            None => {
                if chains.len() as u32 >= cap {
                    return Err(size_cap(total, cap));
                }
                chains.push(vec![it]);
            }
        }
    }
    let bits: f64 = chains.iter().map(|c| ((c.len() + 1) as f64).log2()).sum();
    if bits > cap as f64 + 1e-9 {
        return Err(size_cap(total, cap));
    }
    Ok(chains)
}

fn size_cap(size: usize, cap: u32) -> Error {
    Error::SizeCap {
        what: "alpha support",
        size,
        cap: cap as usize,
        hint: "; use alpha_bounds instead",
    }
}

struct Prefix {
    cost: Vec<Q>,
    weight: Vec<Q>,
}

struct Search<'a> {
    prefixes: &'a [Prefix],
    /// `suffix_weight[c]`: total weight of chains `c..`.
    suffix_weight: Vec<Q>,
    deficit: Q,
    best_cost: Q,
    best_counts: Vec<usize>,
    counts: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, chain: usize, cost: &Q, weight: &Q) {
        if cost > &self.best_cost || (cost == &self.best_cost && !self.best_counts.is_empty()) {
            return;
        }
        if weight >= &self.deficit {
            self.best_cost = cost.clone();
            self.best_counts = self.counts.clone();
            return;
        }
        if chain == self.prefixes.len() || weight + &self.suffix_weight[chain] < self.deficit {
            return;
        }
        let pre = &self.prefixes[chain];
        if chain + 1 == self.prefixes.len() {
            // Last chain: the shortest prefix that closes the deficit is optimal.
            let need = &self.deficit - weight;
            let k = pre.weight.partition_point(|w| w < &need);
            if k < pre.weight.len() {
                let c = cost + &pre.cost[k];
                if c < self.best_cost || self.best_counts.is_empty() && c <= self.best_cost {
                    self.counts[chain] = k;
                    self.best_cost = c;
                    self.best_counts = self.counts.clone();
                    self.counts[chain] = 0;
                }
            }
            return;
        }
        for k in 0..pre.cost.len() {
            let c = cost + &pre.cost[k];
            if c > self.best_cost {
                break;
            }
            self.counts[chain] = k;
            self.run(chain + 1, &c, &(weight + &pre.weight[k]));
        }
        self.counts[chain] = 0;
    }
}

/// Exact `alpha_{D,D'}(eps)` with a minimizing event.
pub fn alpha_exact(q: &AlphaQuery<'_>) -> Result<AlphaResult> {
    alpha_exact_capped(q, DEFAULT_SIZE_CAP)
}

pub fn alpha_exact_capped(q: &AlphaQuery<'_>, cap: u32) -> Result<AlphaResult> {
    let (mut witness, forced_weight, rest) = presolve(q.items());
    if forced_weight >= q.epsilon {
        witness.sort();
        return Ok(AlphaResult {
            value: Q::zero(),
            witness,
            method: AlphaMethod::Exact,
        });
    }
    let deficit = &q.epsilon - &forced_weight;
    let chains = dominance_chains(rest, cap)?;
    let prefixes: Vec<Prefix> = chains
        .iter()
        .map(|c| {
            let mut cost = vec![Q::zero()];
            let mut weight = vec![Q::zero()];
            for it in c {
                cost.push(cost.last().expect("seeded") + &it.cost);
                weight.push(weight.last().expect("seeded") + &it.weight);
            }
            Prefix { cost, weight }
        })
        .collect();
    let mut suffix_weight = vec![Q::zero(); prefixes.len() + 1];
    for c in (0..prefixes.len()).rev() {
        suffix_weight[c] = &suffix_weight[c + 1] + prefixes[c].weight.last().expect("seeded");
    }
    // The greedy event is feasible, so its cost seeds the incumbent.
    let incumbent = alpha_bounds(q).upper;
    let mut search = Search {
        prefixes: &prefixes,
        suffix_weight,
        deficit,
        best_cost: incumbent,
        best_counts: Vec::new(),
        counts: vec![0; prefixes.len()],
    };
    search.run(0, &Q::zero(), &Q::zero());
    if search.best_counts.is_empty() {
        // Nothing beat the greedy event; it is optimal.
        let b = alpha_bounds(q);
        return Ok(AlphaResult {
            value: b.upper,
            witness: b.greedy_event,
            method: AlphaMethod::Exact,
        });
    }
    for (chain, &k) in chains.iter().zip(&search.best_counts) {
        witness.extend(chain[..k].iter().map(|it| it.point.clone()));
    }
    witness.sort();
    Ok(AlphaResult {
        value: search.best_cost,
        witness,
        method: AlphaMethod::Exact,
    })
}

/// Which functional the uniform/exponential closed form evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftDirection {
    /// `alpha_{D,D'}` with `D = U[0,K]`, `D' = Exp(1)`.
    DToDPrime,
    /// `alpha_{D',D}`: the roles of the two distributions swapped.
    DPrimeToD,
}

/// Closed form of alpha for `D = U[0, K]` and `D' = Exp(1)`.
pub fn alpha_uniform_exponential(k: f64, epsilon: f64, direction: ShiftDirection) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Parameter(format!("K = {k} must be positive")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!("epsilon {epsilon} is outside [0, 1]")));
    }
    let tail = (-k).exp();
    Ok(match direction {
        ShiftDirection::DToDPrime if epsilon <= tail => 0.0,
        ShiftDirection::DToDPrime => (1.0 / (1.0 - epsilon + tail)).ln() / k,
        ShiftDirection::DPrimeToD => (-(1.0 - epsilon) * k).exp() - tail,
    })
}

/// Probability mass of `Exp(1)` left beyond the last regular bin.
pub const EXP_TRUNCATION: f64 = 1e-6;

/// `(U[0,K], Exp(1))` discretized on a common one-feature grid.
///
/// `Exp(1)` is cut at its `1 - 1e-6` quantile into `bins` cells of equal
/// mass; the leftover tail becomes one extra atom. Each cell is an atom
/// carrying its exact `Exp(1)` mass and its `U[0,K]` mass rounded to a
/// multiple of `2^-48`, with the rounding residue absorbed so the total is
/// exactly one. Returns `(uniform, exponential)`.
pub fn discretize_uniform_exponential(
    k: f64,
    bins: usize,
) -> Result<(FiniteDistribution, FiniteDistribution)> {
    use crate::distribution::FeatureSpace;
    use num_bigint::BigInt;

    if !(k > 0.0 && k.is_finite()) || bins == 0 {
        return Err(Error::Parameter("need K > 0 and at least one bin".into()));
    }
    let space = FeatureSpace::new(1, (0..=bins as i64).collect())?;
    let quantile = |i: usize| -> f64 {
        let mass = (1.0 - EXP_TRUNCATION) * i as f64 / bins as f64;
        -(-mass).ln_1p()
    };

    let cell_mass = Q::new(
        BigInt::from(1_000_000 - 1),
        BigInt::from(1_000_000u64 * bins as u64),
    );
    let tail_mass = Q::new(BigInt::from(1), BigInt::from(1_000_000));
    let mut exp_atoms: Vec<(StructuredPoint, Q)> = (0..bins)
        .map(|i| (StructuredPoint(vec![i as i64]), cell_mass.clone()))
        .collect();
    exp_atoms.push((StructuredPoint(vec![bins as i64]), tail_mass));

    let scale = (1u64 << 48) as f64;
    let mut units: Vec<i64> = (0..bins)
        .map(|i| {
            let (a, b) = (quantile(i).min(k), quantile(i + 1).min(k));
            ((b - a) / k * scale).round() as i64
        })
        .collect();
    units.push(0);
    // Mass of [0, K] past the truncation point lands in the tail atom.
    let residue = (1i64 << 48) - units.iter().sum::<i64>();
    let last_positive = units
        .iter()
        .rposition(|&u| u > 0)
        .ok_or_else(|| Error::Parameter("K is too small for this grid".into()))?;
    let target = if quantile(bins) < k { bins } else { last_positive };
    units[target] += residue;
    if units[target] < 0 {
        return Err(Error::Parameter("rounding residue exceeds a cell".into()));
    }
    let denom = BigInt::from(1u64 << 48);
    let uni_atoms = units
        .iter()
        .enumerate()
        .map(|(i, &u)| (StructuredPoint(vec![i as i64]), Q::new(BigInt::from(u), denom.clone())))
        .collect();
    Ok((
        FiniteDistribution::new(space.clone(), uni_atoms)?,
        FiniteDistribution::new(space, exp_atoms)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContrapositiveReport {
    pub alpha: String,
    pub epsilon: String,
    /// Members with `Pr_D'[h != f] >= eps`, for which the bound was checked.
    pub checked: usize,
    /// Members below the test-error threshold, for which nothing is claimed.
    pub vacuous: usize,
    pub violations: Vec<Violation>,
    /// Smallest `Pr_D[h != f] - alpha` over checked members.
    pub min_margin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub member: usize,
    pub train_error: String,
    pub test_error: String,
}

/// For every `h` with `Pr_D'[h != f] >= eps`, checks `Pr_D[h != f] >= alpha(eps)`.
pub fn verify_alpha_contrapositive(
    train: &FiniteDistribution,
    test: &FiniteDistribution,
    truth: &Hypothesis,
    class: &HypothesisClass,
    epsilon: Q,
) -> Result<ContrapositiveReport> {
    let q = AlphaQuery::new(train, test, epsilon)?;
    let alpha = alpha_exact(&q)?.value;
    let mut checked = 0;
    let mut vacuous = 0;
    let mut violations = Vec::new();
    let mut min_margin: Option<Q> = None;
    for (i, h) in class.members().iter().enumerate() {
        let test_err = test.disagreement_probability(h, truth)?;
        if test_err < q.epsilon {
            vacuous += 1;
            continue;
        }
        checked += 1;
        let train_err = train.disagreement_probability(h, truth)?;
        let margin = &train_err - &alpha;
        if margin.is_negative() {
            violations.push(Violation {
                member: i,
                train_error: format_rational(&train_err),
                test_error: format_rational(&test_err),
            });
        }
        if min_margin.as_ref().is_none_or(|m| &margin < m) {
            min_margin = Some(margin);
        }
    }
    Ok(ContrapositiveReport {
        alpha: format_rational(&alpha),
        epsilon: format_rational(&q.epsilon),
        checked,
        vacuous,
        violations,
        min_margin: min_margin.map(|m| format_rational(&m)),
    })
}
