//! JSON experiment configurations and their dispatch.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::engines::{
    check_marginal_match, run_alpha_shift, run_marginal_match, run_subspace_transfer,
    EngineReport, InstanceParams, SubspaceParams,
};
use super::scenarios::{grue, xor_pixel, FiniteScenario, GrueParams};
use super::sweep::{sweep, Sparsity, SweepParams, SweepReport};
use crate::distribution::{DistributionDoc, FiniteDistribution, Value};
use crate::hypothesis::{ClassDoc, HypothesisClass, HypothesisSpec};
use crate::shatter::{vc_dimension_exact, DEFAULT_POINT_CAP};
use crate::{Error, Result};

fn default_trials() -> usize {
    200
}
fn default_rate() -> f64 {
    0.1
}
fn default_constants() -> Vec<f64> {
    vec![1.0]
}
fn default_class() -> String {
    "sparse".into()
}
fn default_grid() -> Vec<usize> {
    vec![0, 1, 2, 4, 8, 16, 32, 64]
}
fn default_switch() -> Value {
    8
}
fn default_epsilon() -> f64 {
    0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrueConfig {
    #[serde(default = "default_switch")]
    pub switch: Value,
    #[serde(default)]
    pub train_times: Option<[Value; 2]>,
    #[serde(default)]
    pub test_times: Option<[Value; 2]>,
    #[serde(default = "default_grid")]
    pub m_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_rate")]
    pub epsilon: f64,
    #[serde(default = "default_rate")]
    pub delta: f64,
    #[serde(default = "default_constants")]
    pub bound_constants: Vec<f64>,
    /// Class swept by `sweep`; `experiment` always contrasts both.
    #[serde(default = "default_class")]
    pub class: String,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XorPixelConfig {
    #[serde(default = "default_grid")]
    pub m_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_rate")]
    pub epsilon: f64,
    #[serde(default = "default_rate")]
    pub delta: f64,
    #[serde(default = "default_constants")]
    pub bound_constants: Vec<f64>,
    #[serde(default = "default_class")]
    pub class: String,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalMatchConfig {
    #[serde(default)]
    pub instance: InstanceParams,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaShiftConfig {
    #[serde(default)]
    pub instance: InstanceParams,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Instances whose alpha falls below this are skipped and counted.
    #[serde(default)]
    pub min_alpha: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceTransferConfig {
    #[serde(default)]
    pub instance: SubspaceParams,
    #[serde(default)]
    pub seed: u64,
}

/// A user-supplied finite problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomConfig {
    pub train: DistributionDoc,
    pub test: DistributionDoc,
    pub class: ClassDoc,
    pub truth: HypothesisSpec,
    /// When given, `test` must match `train` on these features.
    #[serde(default)]
    pub match_features: Option<Vec<usize>>,
    /// When given, a `sparse` class with at most this many relevant
    /// features is compared against the full class.
    #[serde(default)]
    pub sparse_k: Option<usize>,
    #[serde(default = "default_grid")]
    pub m_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_rate")]
    pub epsilon: f64,
    #[serde(default = "default_rate")]
    pub delta: f64,
    #[serde(default = "default_class_full")]
    pub sweep_class: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_class_full() -> String {
    "class".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Grue(GrueConfig),
    XorPixel(XorPixelConfig),
    MarginalMatch(MarginalMatchConfig),
    AlphaShift(AlphaShiftConfig),
    SubspaceTransfer(SubspaceTransferConfig),
    Custom(CustomConfig),
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Grue(c) => c.seed,
            Self::XorPixel(c) => c.seed,
            Self::MarginalMatch(c) => c.seed,
            Self::AlphaShift(c) => c.seed,
            Self::SubspaceTransfer(c) => c.seed,
            Self::Custom(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::Grue(c) => c.seed = seed,
            Self::XorPixel(c) => c.seed = seed,
            Self::MarginalMatch(c) => c.seed = seed,
            Self::AlphaShift(c) => c.seed = seed,
            Self::SubspaceTransfer(c) => c.seed = seed,
            Self::Custom(c) => c.seed = seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentReport {
    Sweep(SweepReport),
    Engine(EngineReport),
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        match self {
            Self::Sweep(r) => r.to_csv(),
            Self::Engine(r) => r.to_csv(),
        }
    }
}

/// `k = 1`, `n = 2`, and the exact VC-dimension of the one-feature
/// threshold class over the scenario's values.
fn single_feature_sparsity(scenario: &FiniteScenario) -> Result<Sparsity> {
    let inner = HypothesisClass::thresholds(scenario.space.restricted(1))?;
    let d_k = vc_dimension_exact(&inner, DEFAULT_POINT_CAP)?
        .exact()
        .ok_or_else(|| Error::Precondition("inner VC-dimension search was capped".into()))?;
    Ok(Sparsity {
        k: 1,
        n: scenario.space.n() as u64,
        d_k: d_k as u64,
    })
}

fn grue_scenario(c: &GrueConfig) -> Result<FiniteScenario> {
    grue(GrueParams {
        switch: c.switch,
        train_times: c.train_times,
        test_times: c.test_times,
    })
}

fn finite_params(
    m_grid: &[usize],
    trials: usize,
    epsilon: f64,
    delta: f64,
    seed: u64,
    bound_constants: &[f64],
) -> SweepParams {
    SweepParams {
        m_grid: m_grid.to_vec(),
        trials,
        epsilon,
        delta,
        seed,
        bound_constants: bound_constants.to_vec(),
    }
}

/// Worst consistent OOD error of the sparse and unrestricted grue classes.
pub fn run_grue(c: &GrueConfig) -> Result<SweepReport> {
    let s = grue_scenario(c)?;
    let p = finite_params(&c.m_grid, c.trials, c.epsilon, c.delta, c.seed, &c.bound_constants);
    sweep(&s, &["sparse", "unrestricted"], &p, Some(single_feature_sparsity(&s)?))
}

pub fn run_xor_pixel(c: &XorPixelConfig) -> Result<SweepReport> {
    let s = xor_pixel()?;
    let p = finite_params(&c.m_grid, c.trials, c.epsilon, c.delta, c.seed, &c.bound_constants);
    sweep(&s, &["sparse", "unrestricted"], &p, Some(single_feature_sparsity(&s)?))
}

/// Builds the custom scenario, enforcing `match_features` if present.
pub fn custom_scenario(c: &CustomConfig) -> Result<FiniteScenario> {
    let train = FiniteDistribution::from_doc(&c.train)?;
    let test = FiniteDistribution::from_doc(&c.test)?;
    if train.space() != test.space() {
        return Err(Error::DomainMismatch("train and test spaces differ".into()));
    }
    let class = c.class.build()?;
    if class.space() != train.space() {
        return Err(Error::DomainMismatch(
            "class space differs from the distributions' space".into(),
        ));
    }
    if let Some(a) = &c.match_features {
        check_marginal_match(&train, &test, a)?;
    }
    let space = Arc::new(train.space().clone());
    let truth = c.truth.build(&space)?;
    let mut classes = vec![("class".to_string(), class.clone())];
    if let Some(k) = c.sparse_k {
        classes.push(("sparse".into(), FiniteScenario::restrict_sparsity(&class, k)));
    }
    Ok(FiniteScenario {
        name: "custom".into(),
        space,
        train,
        test,
        truth,
        classes,
        flags: Vec::new(),
    })
}

fn custom_names(s: &FiniteScenario) -> Vec<&str> {
    s.classes.iter().map(|(n, _)| n.as_str()).collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Ok(match cfg {
        ExperimentConfig::Grue(c) => ExperimentReport::Sweep(run_grue(c)?),
        ExperimentConfig::XorPixel(c) => ExperimentReport::Sweep(run_xor_pixel(c)?),
        ExperimentConfig::MarginalMatch(c) => {
            ExperimentReport::Engine(run_marginal_match(&c.instance, c.seed)?)
        }
        ExperimentConfig::AlphaShift(c) => {
            ExperimentReport::Engine(run_alpha_shift(&c.instance, c.epsilon, c.min_alpha, c.seed)?)
        }
        ExperimentConfig::SubspaceTransfer(c) => {
            ExperimentReport::Engine(run_subspace_transfer(&c.instance, c.seed)?)
        }
        ExperimentConfig::Custom(c) => {
            let s = custom_scenario(c)?;
            let p = finite_params(&c.m_grid, c.trials, c.epsilon, c.delta, c.seed, &[]);
            ExperimentReport::Sweep(sweep(&s, &custom_names(&s), &p, None)?)
        }
    })
}

/// Sample-complexity sweep of one class, with bound columns where the
/// sparsity is known.
pub fn sample_complexity_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    match cfg {
        ExperimentConfig::Grue(c) => {
            let s = grue_scenario(c)?;
            let p = finite_params(&c.m_grid, c.trials, c.epsilon, c.delta, c.seed, &c.bound_constants);
            sweep(&s, &[&c.class], &p, Some(single_feature_sparsity(&s)?))
        }
        ExperimentConfig::XorPixel(c) => {
            let s = xor_pixel()?;
            let p = finite_params(&c.m_grid, c.trials, c.epsilon, c.delta, c.seed, &c.bound_constants);
            sweep(&s, &[&c.class], &p, Some(single_feature_sparsity(&s)?))
        }
        ExperimentConfig::Custom(c) => {
            let s = custom_scenario(c)?;
            let p = finite_params(&c.m_grid, c.trials, c.epsilon, c.delta, c.seed, &[]);
            sweep(&s, &[&c.sweep_class], &p, None)
        }
        _ => Err(Error::Parameter(
            "sweeps need a finite scenario: grue, xor_pixel or custom".into(),
        )),
    }
}
