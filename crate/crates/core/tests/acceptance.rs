//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p oodlab-core --test acceptance`.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::index::sample as sample_indices;
use rand::Rng;

use oodlab_core::alpha::{alpha_bounds, alpha_exact, discretize_uniform_exponential};
use oodlab_core::bounds::{
    alpha_sample_bound, blumer_sample_bound, monomial_count, parameter_count,
    semialgebraic_vc_bound, sparse_ood_sample_bound, sparse_vc_bound, subspace_junta_vc_bound,
    t_combination_vc_bound, union_vc_bound,
};
use oodlab_core::junta::verify_all;
use oodlab_core::lab::engines::{
    run_alpha_shift, run_marginal_match, run_subspace_transfer, InstanceParams, SubspaceParams,
};
use oodlab_core::lab::erm::label_with;
use oodlab_core::lab::{grue, sweep, worst_consistent_ood_error, xor_pixel, GrueParams, SweepParams};
use oodlab_core::rational::{from_f64, q, qi, to_f64};
use oodlab_core::rng::{trial_generator, Generator};
use oodlab_core::{
    alpha_uniform_exponential, shatters, sparse_lift, vc_dimension_exact, AlphaQuery, FeatureSpace,
    FiniteDistribution, Hypothesis, HypothesisClass, InnerFunction, ShiftDirection,
    StructuredPoint, SubspaceJunta, Q,
};

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: oodlab_core::Error) -> String {
    e.to_string()
}

fn alpha_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for k in [0.5, 1.0, 2.0] {
        let (uniform, exponential) = discretize_uniform_exponential(k, 10_000).map_err(err)?;
        for eps in [0.2, 0.5, 0.9] {
            for dir in [ShiftDirection::DToDPrime, ShiftDirection::DPrimeToD] {
                let start = Instant::now();
                let (train, test) = match dir {
                    ShiftDirection::DToDPrime => (&uniform, &exponential),
                    ShiftDirection::DPrimeToD => (&exponential, &uniform),
                };
                let query = AlphaQuery::new(train, test, from_f64(eps).map_err(err)?).map_err(err)?;
                let exact = to_f64(&alpha_exact(&query).map_err(err)?.value);
                let closed = alpha_uniform_exponential(k, eps, dir).map_err(err)?;
                let elapsed = start.elapsed();
                slowest = slowest.max(elapsed);
                worst = worst.max((exact - closed).abs());
                ensure((exact - closed).abs() <= 1e-3, || {
                    format!("K={k} eps={eps} {dir:?}: exact {exact} vs closed form {closed}")
                })?;
                ensure(elapsed < Duration::from_secs(10), || {
                    format!("K={k} eps={eps} {dir:?} took {elapsed:?}")
                })?;
            }
        }
        // Sandwich on a coarser grid.
        let (uniform, exponential) = discretize_uniform_exponential(k, 5_000).map_err(err)?;
        for eps in [0.2, 0.5, 0.9] {
            let query = AlphaQuery::new(&uniform, &exponential, from_f64(eps).map_err(err)?).map_err(err)?;
            let b = alpha_bounds(&query);
            let exact = alpha_exact(&query).map_err(err)?.value;
            ensure(b.lower <= exact && exact <= b.upper, || {
                format!("K={k} eps={eps}: sandwich broken")
            })?;
            let gap = to_f64(&(&b.upper - &b.lower));
            ensure(gap <= 1e-3, || format!("K={k} eps={eps}: sandwich gap {gap}"))?;
        }
    }
    Ok(format!("18 cases, max |exact - closed| = {worst:.2e}, slowest {slowest:.2?}"))
}

fn alpha_zero_rule() -> Outcome {
    let space = FeatureSpace::new(2, (0..4).collect()).map_err(err)?;
    let points = space.points().map_err(err)?;
    let mut checked = 0;
    for i in 0..100u64 {
        let mut rng = trial_generator(SEED, i);
        let support = rng.random_range(1..points.len());
        let order = sample_indices(&mut rng, points.len(), points.len()).into_vec();
        let (inside, outside) = order.split_at(support);
        let train_w = inside.iter().map(|&j| (points[j].clone(), qi(rng.random_range(1..=9)))).collect();
        let train = FiniteDistribution::from_weights(space.clone(), train_w).map_err(err)?;
        let mu = q(rng.random_range(1..=9), 10);
        let off = &outside[..rng.random_range(1..=outside.len())];
        let on = &inside[..rng.random_range(0..=inside.len())];
        let mut test_w: Vec<(StructuredPoint, Q)> = off
            .iter()
            .map(|&j| (points[j].clone(), &mu / qi(off.len() as i64)))
            .collect();
        if on.is_empty() {
            // No on-support mass available: all of it goes off support.
            test_w.iter_mut().for_each(|(_, p)| *p = &*p / &mu);
        } else {
            let rest = (qi(1) - &mu) / qi(on.len() as i64);
            test_w.extend(on.iter().map(|&j| (points[j].clone(), rest.clone())));
        }
        let test = FiniteDistribution::new(space.clone(), test_w).map_err(err)?;
        let off_mass = test.mass_where(|p| train.prob(p).is_zero());
        let random = &off_mass * q(rng.random_range(0..=100), 100);
        for eps in [qi(0), &off_mass / qi(2), random, off_mass.clone()] {
            let query = AlphaQuery::new(&train, &test, eps.clone()).map_err(err)?;
            let a = alpha_exact(&query).map_err(err)?.value;
            checked += 1;
            ensure(a.is_zero(), || format!("pair {i}: alpha({eps}) = {a}, off-support mass {off_mass}"))?;
        }
    }
    Ok(format!("{checked} (pair, eps) checks, all exactly 0"))
}

fn alpha_shift_engine() -> Outcome {
    let params = InstanceParams {
        instances: 300,
        max_support: 12,
        class_size: 64,
        ..InstanceParams::default()
    };
    let r = run_alpha_shift(&params, 0.3, 0.0, SEED).map_err(err)?;
    let contra = r.contrapositive_violations.unwrap_or(0);
    ensure(r.violations == 0 && contra == 0, || {
        format!(
            "{} violations, {contra} contrapositive violations; first: {:?}",
            r.violations, r.first_violation
        )
    })?;
    Ok(format!(
        "{} instances, {} checks, {} contrapositive checks, 0 violations",
        r.instances,
        r.checks,
        r.contrapositive_checks.unwrap_or(0)
    ))
}

fn random_class(rng: &mut Generator, space: &Arc<FeatureSpace>, members: usize) -> Result<HypothesisClass, String> {
    let size = space.size().unwrap();
    let hs = (0..members)
        .map(|_| {
            let table: Vec<bool> = (0..size).map(|_| rng.random()).collect();
            Hypothesis::from_table(space.clone(), &table)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    HypothesisClass::new(space.clone(), hs).map_err(err)
}

fn exact_vc(class: &HypothesisClass) -> Result<usize, String> {
    Ok(vc_dimension_exact(class, 64).map_err(err)?.lower_bound())
}

fn vc_inequalities() -> Outcome {
    let mut tightest = f64::INFINITY;
    for i in 0..200u64 {
        let mut rng = trial_generator(SEED ^ 0x4c, i);
        let values = rng.random_range(2..=10);
        let space = Arc::new(FeatureSpace::new(1, (0..values).collect()).map_err(err)?);
        let m = rng.random_range(1..=20);
        let mut parts = Vec::new();
        let mut d = 0;
        for _ in 0..m {
            let members = 1 << rng.random_range(0..=3);
            let c = random_class(&mut rng, &space, members)?;
            d = d.max(exact_vc(&c)?);
            parts.push(c);
        }
        let union = HypothesisClass::union(&parts).map_err(err)?;
        let vc = exact_vc(&union)?;
        let bound = union_vc_bound(d as f64, m as f64).map_err(err)?;
        tightest = tightest.min(bound - vc as f64);
        ensure(vc as f64 <= bound, || format!("union {i}: VC {vc} > bound {bound}"))?;
    }
    for i in 0..200u64 {
        let mut rng = trial_generator(SEED ^ 0x5a, i);
        let n = rng.random_range(2..=6);
        let k = rng.random_range(1..=2);
        let values = if n > 4 { 2 } else { rng.random_range(2..=3) };
        let inner_space = Arc::new(FeatureSpace::new(k, (0..values).collect()).map_err(err)?);
        let members = rng.random_range(1..=8);
        let inner = random_class(&mut rng, &inner_space, members)?;
        let d_k = exact_vc(&inner)?;
        let lifted = sparse_lift(&inner, n).map_err(err)?;
        let vc = exact_vc(&lifted)?;
        let bound = sparse_vc_bound(d_k as f64, k as u64, n as f64).map_err(err)?;
        tightest = tightest.min(bound - vc as f64);
        ensure(vc as f64 <= bound, || format!("lift {i}: VC {vc} > bound {bound}"))?;
    }
    Ok(format!("400 classes, smallest slack {tightest:.2}"))
}

fn halfspace_sanity() -> Outcome {
    let space = Arc::new(FeatureSpace::new(2, (0..5).collect()).map_err(err)?);
    let points = space.points().map_err(err)?;
    let coords = |p: &StructuredPoint| p.coords().iter().map(|&v| qi(v)).collect::<Vec<Q>>();
    let identity = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
    let mut members = Vec::new();
    for a in -6..=6i64 {
        for b in -6..=6i64 {
            if a == 0 && b == 0 {
                continue;
            }
            let mut levels: Vec<i64> = points.iter().map(|p| a * p.0[0] + b * p.0[1]).collect();
            levels.sort_unstable();
            levels.dedup();
            levels.push(levels.last().unwrap() + 1);
            for t in levels {
                let inner = InnerFunction::Halfspace {
                    weights: vec![qi(a), qi(b)],
                    threshold: qi(t),
                };
                let junta = SubspaceJunta::new(identity.clone(), inner).map_err(err)?;
                let h = Hypothesis::from_fn(space.clone(), |p| junta.evaluate(&coords(p)).expect("dimension 2"))
                    .map_err(err)?;
                members.push(h);
            }
        }
    }
    let class = HypothesisClass::new(space.clone(), members).map_err(err)?;
    let vc = vc_dimension_exact(&class, 8).map_err(err)?;
    let triple = vc.witness().points.clone();
    ensure(triple.len() == 3, || format!("largest shattered set has {} points", triple.len()))?;
    ensure(shatters(&class, &triple).map_err(err)?.is_shattered(), || "witness not shattered".into())?;
    let mut rng = trial_generator(SEED ^ 0x55, 0);
    for s in 0..500 {
        let four: Vec<StructuredPoint> = sample_indices(&mut rng, points.len(), 4)
            .into_iter()
            .map(|i| points[i].clone())
            .collect();
        ensure(!shatters(&class, &four).map_err(err)?.is_shattered(), || {
            format!("sample {s}: 4-set {four:?} shattered")
        })?;
    }
    let shown: Vec<String> = triple.iter().map(|p| p.to_string()).collect();
    Ok(format!(
        "{} halfspaces, shattered {}, 500 random 4-sets refuted",
        class.len(),
        shown.join(" ")
    ))
}

fn square_wave_shattering() -> Outcome {
    let s = verify_all(12).map_err(err)?;
    ensure(s.verified == s.labelings && s.labelings == 1 << 12, || {
        format!("{}/{} verified, first failure {:?}", s.verified, s.labelings, s.first_failure)
    })?;
    Ok(format!("{}/{} labelings at m = 12", s.verified, s.labelings))
}

fn marginal_match_engine() -> Outcome {
    let params = InstanceParams {
        instances: 200,
        ..InstanceParams::default()
    };
    let r = run_marginal_match(&params, SEED).map_err(err)?;
    ensure(r.violations == 0, || format!("{} violations; first {:?}", r.violations, r.first_violation))?;
    Ok(format!("{} instances, {} checks, 0 violations", r.instances, r.checks))
}

fn subspace_transfer_engine() -> Outcome {
    let params = SubspaceParams {
        instances: 100,
        ..SubspaceParams::default()
    };
    let r = run_subspace_transfer(&params, SEED).map_err(err)?;
    ensure(r.violations == 0, || format!("{} violations; first {:?}", r.violations, r.first_violation))?;
    Ok(format!(
        "{} instances, {} checks, {} precondition rejections, 0 violations",
        r.instances, r.checks, r.precondition_rejections
    ))
}

fn contrast() -> Outcome {
    let mut parts = Vec::new();
    for (scenario, seen) in [
        (grue(GrueParams::new(8)).map_err(err)?, vec![[0, 0], [0, 1]]),
        (xor_pixel().map_err(err)?, vec![[0, 0], [1, 0]]),
    ] {
        let pts = seen.iter().map(|p| StructuredPoint::new(p.to_vec())).collect();
        let samples = label_with(&scenario.truth, pts).map_err(err)?;
        let worst = |name: &str| -> Result<Q, String> {
            let class = scenario.class(name).map_err(err)?;
            worst_consistent_ood_error(class, &samples, &scenario.truth, &scenario.test).map_err(err)
        };
        let (sparse, all) = (worst("sparse")?, worst("unrestricted")?);
        ensure(sparse == qi(0) && all == qi(1), || {
            format!("{}: sparse {sparse}, unrestricted {all}", scenario.name)
        })?;
        parts.push(format!("{}: sparse 0, unrestricted 1", scenario.name));
    }
    Ok(parts.join("; "))
}

fn grue_sweep() -> Outcome {
    let scenario = grue(GrueParams::new(8)).map_err(err)?;
    let params = SweepParams {
        m_grid: vec![0, 1, 2, 4, 8, 16, 32, 64, 128, 256],
        trials: 200,
        epsilon: 0.1,
        delta: 0.1,
        seed: SEED,
        bound_constants: vec![1.0],
    };
    let report = sweep(&scenario, &["sparse"], &params, None).map_err(err)?;
    let rows = &report.classes[0].rows;
    let quantiles: Vec<Q> = rows.iter().map(|r| r.quantile_worst.value().clone()).collect();
    for (w, row) in quantiles.windows(2).zip(&rows[1..]) {
        ensure(w[1] <= w[0], || format!("quantile rises to {} at m = {}", w[1], row.m))?;
    }
    let last = quantiles.last().unwrap();
    ensure(last.is_zero(), || format!("quantile at m = 256 is {last}"))?;
    let shown: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{}", r.m, r.quantile_worst.value()))
        .collect();
    Ok(format!("0.9-quantiles {}", shown.join(" ")))
}

/// Rounds to four significant figures.
fn sig4(x: f64) -> String {
    format!("{:.3e}", x)
}

fn calculator_table() -> Outcome {
    use std::f64::consts::E;
    let cases: Vec<(&str, f64, f64)> = vec![
        ("blumer(1, 1/e, 1/e)", blumer_sample_bound(1.0, 1.0 / E, 1.0 / E, 1.0).map_err(err)?, 5.43656),
        ("alpha_sample(2, 0.1, 0.1)", alpha_sample_bound(2.0, 0.1, 0.1, 1.0).map_err(err)?, 92.1034),
        ("union(3, 100)", union_vc_bound(3.0, 100.0).map_err(err)?, 58.0517),
        ("union(0, 2)", union_vc_bound(0.0, 2.0).map_err(err)?, 6.93147),
        ("sparse(2, 2, 10)", sparse_vc_bound(2.0, 2, 10.0).map_err(err)?, 54.0517),
        (
            "sparse_ood(1, 1, e, 1/e, 1/e)",
            sparse_ood_sample_bound(1.0, 1, E, 1.0 / E, 1.0 / E, 1.0).map_err(err)?,
            10.8731,
        ),
        ("semialgebraic(1, 1, 2)", semialgebraic_vc_bound(1, 1, 2).map_err(err)?, 15.5098),
        ("semialgebraic(1, 1, 9)", semialgebraic_vc_bound(1, 1, 9).map_err(err)?, 86.4386),
        ("subspace(2, 1, 1, 1)", subspace_junta_vc_bound(2, 1, 1, 1).map_err(err)?, 36.6797),
        ("t_combination(1, 1, 1)", t_combination_vc_bound(1.0, 1, 1).map_err(err)?, 7.16993),
        ("t_combination(4, 1, 2)", t_combination_vc_bound(4.0, 1, 2).map_err(err)?, 36.6797),
        ("monomials(2, 2)", to_float(&monomial_count(2, 2)), 6.0),
        ("parameters(2, 1, 1, 1)", to_float(&parameter_count(2, 1, 1, 1)), 4.0),
    ];
    for (name, got, want) in &cases {
        ensure(sig4(*got) == sig4(*want), || format!("{name}: {got} vs {want}"))?;
    }
    let mut identities = 0;
    for n in 1..=6u64 {
        for k in 1..=n {
            for ell in 1..=3u64 {
                for t in 1..=3u64 {
                    let direct = subspace_junta_vc_bound(n, ell, k, t).map_err(err)?;
                    let d = to_float(&parameter_count(n, ell, k, t));
                    let composed = t_combination_vc_bound(d, t, ell + 1).map_err(err)?;
                    ensure((direct - composed).abs() <= 1e-9 * direct, || {
                        format!("identity fails at n={n} k={k} ell={ell} t={t}: {direct} vs {composed}")
                    })?;
                    identities += 1;
                }
            }
        }
    }
    Ok(format!("{} examples to 4 significant figures, {identities} identity checks", cases.len()))
}

fn to_float(x: &num_bigint::BigUint) -> f64 {
    x.to_string().parse().expect("small count")
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Check, u64); 11] = [
        ("alpha closed-form cross-check", alpha_closed_form, 180),
        ("alpha zero rule", alpha_zero_rule, 5),
        ("alpha shift engine", alpha_shift_engine, 60),
        ("union and sparse VC inequalities", vc_inequalities, 300),
        ("halfspace sanity in the plane", halfspace_sanity, 60),
        ("square-wave shattering at m = 12", square_wave_shattering, 30),
        ("marginal match engine", marginal_match_engine, 60),
        ("subspace transfer engine", subspace_transfer_engine, 120),
        ("grue and XOR contrast", contrast, 1),
        ("grue sweep quantile", grue_sweep, 120),
        ("calculator regression table", calculator_table, 1),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(detail) if secs > *budget as f64 => Err(format!("{detail}; over the {budget} s budget")),
            other => other,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {:>2}: {status} {name} [{secs:.2} s] {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
