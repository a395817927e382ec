//! Seeded Monte Carlo sweeps of worst consistent OOD error over sample sizes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::erm::ErmTable;
use super::scenarios::FiniteScenario;
use super::stats::{clopper_pearson, median, order_quantile, BinomialInterval};
use crate::bounds::sparse_ood_sample_bound;
use crate::rational::{format_rational, from_f64, to_f64, Q};
use crate::rng::{trial_generator, GENERATOR_ID};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub m_grid: Vec<usize>,
    pub trials: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    /// Constants `C` for the bound columns.
    pub bound_constants: Vec<f64>,
}

impl SweepParams {
    fn validate(&self) -> Result<Vec<usize>> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!(
                "epsilon = {} and delta = {} must lie in (0, 1)",
                self.epsilon, self.delta
            )));
        }
        if let Some(c) = self.bound_constants.iter().find(|c| !(**c > 0.0)) {
            return Err(Error::Parameter(format!("bound constant {c} must be positive")));
        }
        let mut grid = self.m_grid.clone();
        grid.sort_unstable();
        grid.dedup();
        if grid.is_empty() {
            return Err(Error::Parameter("m_grid is empty".into()));
        }
        Ok(grid)
    }

    /// `1 - delta`.
    pub fn quantile_level(&self) -> f64 {
        1.0 - self.delta
    }
}

/// Sparsity data used by the bound columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sparsity {
    pub k: u64,
    pub n: u64,
    /// VC-dimension of the inner class on `S^k`.
    pub d_k: u64,
}

/// An exact rational alongside its `f64` value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exact {
    pub exact: String,
    pub approx: f64,
    #[serde(skip)]
    value: Q,
}

impl Exact {
    pub fn new(value: Q) -> Self {
        Self {
            exact: format_rational(&value),
            approx: to_f64(&value),
            value,
        }
    }

    pub fn value(&self) -> &Q {
        &self.value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundColumn {
    pub c: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub trials: usize,
    pub min_worst: Exact,
    pub median_worst: Exact,
    pub quantile_worst: Exact,
    pub max_worst: Exact,
    /// Fraction of trials with worst error at most epsilon.
    pub success: BinomialInterval,
    pub meets_epsilon: bool,
    pub bounds: Vec<BoundColumn>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSweep {
    pub class: String,
    pub class_size: usize,
    /// Smallest grid `m` whose quantile is at most epsilon.
    pub first_m_meeting_epsilon: Option<usize>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub version: &'static str,
    pub generator: &'static str,
    pub seed: u64,
    pub scenario: String,
    pub epsilon: f64,
    pub delta: f64,
    pub quantile_level: f64,
    pub trials: usize,
    pub flags: Vec<String>,
    pub warnings: Vec<String>,
    /// How each reported field was obtained.
    pub field_kinds: BTreeMap<&'static str, &'static str>,
    pub sparsity: Option<Sparsity>,
    pub classes: Vec<ClassSweep>,
}

fn field_kinds() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("min_worst, median_worst, quantile_worst, max_worst", "exact: order statistics of exact per-trial worst errors"),
        ("success", "estimate: fraction of trials, Clopper-Pearson 95% interval"),
        ("bounds", "formula: sparse OOD sample bound at rate epsilon for each C"),
    ])
}

/// Worst consistent OOD error per trial (outer) and grid point (inner).
/// Trial `i` draws one sequence from the train distribution with its own
/// stream, so the samples for smaller `m` are prefixes of those for larger.
pub fn trial_curves(
    scenario: &FiniteScenario,
    table: &ErmTable,
    grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<Vec<Q>>> {
    let max_m = *grid.last().unwrap_or(&0);
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_generator(seed, i as u64);
            let points = scenario.train.sample(&mut rng, max_m);
            let mut alive = table.all_alive();
            let mut curve = Vec::with_capacity(grid.len());
            let mut seen = 0;
            for &m in grid {
                for p in &points[seen..m] {
                    let index = scenario.space.index_of(p).ok_or_else(|| {
                        Error::DomainMismatch(format!("sample {p} is outside the space"))
                    })?;
                    table.observe(&mut alive, index, scenario.truth.value_at(index));
                }
                seen = m;
                curve.push(table.range(&alive).map_or_else(crate::rational::zero, |r| r.worst));
            }
            Ok(curve)
        })
        .collect()
}

/// Sweeps the named classes of `scenario` over the grid.
pub fn sweep(
    scenario: &FiniteScenario,
    classes: &[&str],
    params: &SweepParams,
    sparsity: Option<Sparsity>,
) -> Result<SweepReport> {
    let grid = params.validate()?;
    let eps = from_f64(params.epsilon)?;
    let level = params.quantile_level();
    let bounds: Vec<BoundColumn> = match sparsity {
        Some(s) => params
            .bound_constants
            .iter()
            .map(|&c| {
                Ok(BoundColumn {
                    c,
                    m: sparse_ood_sample_bound(s.d_k as f64, s.k, s.n as f64, params.epsilon, params.delta, c)?,
                })
            })
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let mut out = Vec::new();
    for &name in classes {
        let class = scenario.class(name)?;
        let table = ErmTable::new(class, &scenario.truth, &scenario.test)?;
        let curves = trial_curves(scenario, &table, &grid, params.trials, params.seed)?;
        let mut rows = Vec::new();
        for (j, &m) in grid.iter().enumerate() {
            let column: Vec<Q> = curves.iter().map(|c| c[j].clone()).collect();
            let quantile = order_quantile(&column, level).expect("trials > 0");
            let successes = column.iter().filter(|w| **w <= eps).count() as u64;
            rows.push(SweepRow {
                m,
                trials: params.trials,
                min_worst: Exact::new(column.iter().min().expect("trials > 0").clone()),
                median_worst: Exact::new(median(&column).expect("trials > 0")),
                meets_epsilon: quantile <= eps,
                quantile_worst: Exact::new(quantile),
                max_worst: Exact::new(column.iter().max().expect("trials > 0").clone()),
                success: clopper_pearson(successes, params.trials as u64, 0.95),
                bounds: bounds.clone(),
            });
        }
        out.push(ClassSweep {
            class: name.to_string(),
            class_size: class.len(),
            first_m_meeting_epsilon: rows.iter().find(|r| r.meets_epsilon).map(|r| r.m),
            rows,
        });
    }
    let mut warnings = Vec::new();
    let wanted = (50.0 / params.delta).ceil() as usize;
    if params.trials < wanted {
        warnings.push(format!(
            "{} trials is below 50/delta = {wanted}; the {level} quantile is coarse",
            params.trials
        ));
    }
    Ok(SweepReport {
        version: crate::VERSION,
        generator: GENERATOR_ID,
        seed: params.seed,
        scenario: scenario.name.clone(),
        epsilon: params.epsilon,
        delta: params.delta,
        quantile_level: level,
        trials: params.trials,
        flags: scenario.flags.clone(),
        warnings,
        field_kinds: field_kinds(),
        sparsity,
        classes: out,
    })
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "class,m,trials,min_worst,median_worst,quantile_worst,max_worst,success_rate,success_lower,success_upper,meets_epsilon";

    /// One row per class and grid point; bound columns are named `bound_C=<c>`.
    pub fn to_csv(&self) -> String {
        let mut header = Self::CSV_HEADER.to_string();
        let constants: Vec<f64> = self
            .classes
            .first()
            .and_then(|c| c.rows.first())
            .map(|r| r.bounds.iter().map(|b| b.c).collect())
            .unwrap_or_default();
        for c in &constants {
            header.push_str(&format!(",bound_C={c}"));
        }
        let mut out = header + "\n";
        for class in &self.classes {
            for r in &class.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    class.class,
                    r.m,
                    r.trials,
                    r.min_worst.approx,
                    r.median_worst.approx,
                    r.quantile_worst.approx,
                    r.max_worst.approx,
                    r.success.estimate,
                    r.success.lower,
                    r.success.upper,
                    r.meets_epsilon
                ));
                for b in &r.bounds {
                    out.push_str(&format!(",{}", b.m));
                }
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::scenarios::{grue, xor_pixel, GrueParams};

    fn params(grid: Vec<usize>, trials: usize) -> SweepParams {
        SweepParams {
            m_grid: grid,
            trials,
            epsilon: 0.1,
            delta: 0.1,
            seed: 7,
            bound_constants: vec![1.0],
        }
    }

    #[test]
    fn zero_samples_row_is_the_no_data_worst() {
        let s = grue(GrueParams::new(4)).unwrap();
        let r = sweep(&s, &["sparse", "unrestricted"], &params(vec![0, 4], 5), None).unwrap();
        for c in &r.classes {
            assert_eq!(c.rows[0].min_worst.exact, "1/1");
            assert_eq!(c.rows[0].max_worst.exact, "1/1");
        }
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn nested_samples_give_monotone_curves() {
        let s = grue(GrueParams::new(4)).unwrap();
        let table = ErmTable::new(s.class("sparse").unwrap(), &s.truth, &s.test).unwrap();
        let curves = trial_curves(&s, &table, &[0, 1, 2, 4, 8, 16, 32], 30, 3).unwrap();
        for c in &curves {
            assert!(c.windows(2).all(|w| w[0] >= w[1]), "{c:?}");
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let s = xor_pixel().unwrap();
        let p = params(vec![0, 1, 2, 8], 20);
        let a = sweep(&s, &["sparse"], &p, None).unwrap();
        let b = sweep(&s, &["sparse"], &p, None).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn csv_layout() {
        let s = xor_pixel().unwrap();
        let sp = Sparsity { k: 1, n: 2, d_k: 2 };
        let mut p = params(vec![0, 8], 3);
        p.bound_constants = vec![0.5, 1.0];
        let r = sweep(&s, &["sparse", "unrestricted"], &p, Some(sp)).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].ends_with("meets_epsilon,bound_C=0.5,bound_C=1"));
        assert!(lines.iter().all(|l| l.split(',').count() == 13));
    }

    #[test]
    fn bad_params() {
        let s = xor_pixel().unwrap();
        assert!(sweep(&s, &["sparse"], &params(vec![], 3), None).is_err());
        assert!(sweep(&s, &["sparse"], &params(vec![1], 0), None).is_err());
        let mut p = params(vec![1], 3);
        p.epsilon = 1.0;
        assert!(sweep(&s, &["sparse"], &p, None).is_err());
    }
}
