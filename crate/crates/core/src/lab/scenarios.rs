//! The grue and XOR-pixel scenarios as finite train/test problems.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distribution::{FeatureSpace, FiniteDistribution, StructuredPoint, Value};
use crate::hypothesis::{feat, sparse_lift, Hypothesis, HypothesisClass};
use crate::{Error, Result};

/// A realizable finite problem: train and test distributions on one space,
/// a ground truth, and named classes to compare.
#[derive(Debug, Clone)]
pub struct FiniteScenario {
    pub name: String,
    pub space: Arc<FeatureSpace>,
    pub train: FiniteDistribution,
    pub test: FiniteDistribution,
    pub truth: Hypothesis,
    pub classes: Vec<(String, HypothesisClass)>,
    /// Warnings about the configuration, e.g. overlapping supports.
    pub flags: Vec<String>,
}

impl FiniteScenario {
    pub fn class(&self, name: &str) -> Result<&HypothesisClass> {
        self.classes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
            .ok_or_else(|| {
                let known: Vec<&str> = self.classes.iter().map(|(n, _)| n.as_str()).collect();
                Error::Parameter(format!("scenario has no class '{name}' (known: {known:?})"))
            })
    }

    /// Members with at most `k` relevant features.
    pub fn restrict_sparsity(class: &HypothesisClass, k: usize) -> HypothesisClass {
        class.filter(|h| feat(h).len() <= k)
    }
}

/// Half-open time ranges for the grue scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrueParams {
    /// The switch time `T`; time values are `0..2T`.
    pub switch: Value,
    #[serde(default)]
    pub train_times: Option<[Value; 2]>,
    #[serde(default)]
    pub test_times: Option<[Value; 2]>,
}

impl GrueParams {
    pub fn new(switch: Value) -> Self {
        Self {
            switch,
            train_times: None,
            test_times: None,
        }
    }
}

const TIME: usize = 0;
const EMERALD: usize = 1;

/// Points `(t, e)` with `t` in `[lo, hi)` and `e` in `{0, 1}`, uniform.
fn time_slab(space: &FeatureSpace, [lo, hi]: [Value; 2]) -> Result<FiniteDistribution> {
    let points: Vec<StructuredPoint> = (lo..hi)
        .flat_map(|t| [0, 1].map(|e| StructuredPoint::new(vec![t, e])))
        .collect();
    if points.is_empty() {
        return Err(Error::Parameter(format!("empty time range [{lo}, {hi})")));
    }
    FiniteDistribution::uniform(space.clone(), points)
}

/// Features `(t, e)`; truth `f(t, e) = e`. Classes: `unrestricted` holds the
/// lifted single-feature thresholds plus every grue and bleen switch rule;
/// `sparse` is its restriction to members with at most one relevant feature.
pub fn grue(params: GrueParams) -> Result<FiniteScenario> {
    let t = params.switch;
    if !(1..=64).contains(&t) {
        return Err(Error::Parameter(format!("switch time {t} must lie in 1..=64")));
    }
    let train_times = params.train_times.unwrap_or([0, t]);
    let test_times = params.test_times.unwrap_or([t, 2 * t]);
    for [lo, hi] in [train_times, test_times] {
        if lo < 0 || hi > 2 * t || lo >= hi {
            return Err(Error::Parameter(format!(
                "time range [{lo}, {hi}) must be a nonempty part of [0, {})",
                2 * t
            )));
        }
    }
    let space = Arc::new(FeatureSpace::new(2, (0..2 * t).collect())?);
    let train = time_slab(&space, train_times)?;
    let test = time_slab(&space, test_times)?;
    let mut flags = Vec::new();
    if train_times[0] < test_times[1] && test_times[0] < train_times[1] {
        flags.push(format!(
            "train times {train_times:?} and test times {test_times:?} overlap"
        ));
    }
    let truth = Hypothesis::dictator(space.clone(), EMERALD)?;
    let inner = HypothesisClass::thresholds(space.restricted(1))?;
    let lifted = sparse_lift(&inner, 2)?;
    let mut rules = Vec::new();
    for &s in space.values() {
        let g = Hypothesis::grue(space.clone(), TIME, EMERALD, s)?;
        rules.push(g.negate());
        rules.push(g);
    }
    let unrestricted = HypothesisClass::union(&[lifted, HypothesisClass::new(space.clone(), rules)?])?;
    let sparse = FiniteScenario::restrict_sparsity(&unrestricted, 1);
    Ok(FiniteScenario {
        name: "grue".into(),
        space,
        train,
        test,
        truth,
        classes: vec![("sparse".into(), sparse), ("unrestricted".into(), unrestricted)],
        flags,
    })
}

/// Features `(x, y)` over `{0, 1}`; train has `y = 0`, test has `y = 1`,
/// truth `f = x`. Classes: `sparse` (lifted single-feature thresholds) and
/// `unrestricted` (all 16 functions).
pub fn xor_pixel() -> Result<FiniteScenario> {
    let space = Arc::new(FeatureSpace::binary(2)?);
    let slab = |y: Value| {
        FiniteDistribution::uniform(
            (*space).clone(),
            vec![StructuredPoint::new(vec![0, y]), StructuredPoint::new(vec![1, y])],
        )
    };
    let inner = HypothesisClass::thresholds(space.restricted(1))?;
    Ok(FiniteScenario {
        name: "xor_pixel".into(),
        train: slab(0)?,
        test: slab(1)?,
        truth: Hypothesis::dictator(space.clone(), 0)?,
        classes: vec![
            ("sparse".into(), sparse_lift(&inner, 2)?),
            ("unrestricted".into(), HypothesisClass::all_functions(space.clone())?),
        ],
        space,
        flags: Vec::new(),
    })
}
