//! Fixtures shared by the criterion benches.

use oodlab_core::alpha::discretize_uniform_exponential;
use oodlab_core::rational::q;
use oodlab_core::{FeatureSpace, FiniteDistribution, HypothesisClass, StructuredPoint};

/// Uniform[0, k] and truncated Exp(1) on `bins` equal-mass atoms.
pub fn uniform_exponential(k: f64, bins: usize) -> (FiniteDistribution, FiniteDistribution) {
    discretize_uniform_exponential(k, bins).expect("valid discretization")
}

/// Two distributions on `size` atoms of a one-feature space with
/// deterministic, distinct weights.
pub fn skewed_pair(size: usize) -> (FiniteDistribution, FiniteDistribution) {
    let space = FeatureSpace::new(1, (0..size as i64).collect()).expect("space");
    let pt = |i: usize| StructuredPoint::new(vec![i as i64]);
    let train = (0..size).map(|i| (pt(i), q(1 + (i as i64 * 7) % 11, 1))).collect();
    let test = (0..size).map(|i| (pt(i), q(1 + (i as i64 * 5) % 13, 1))).collect();
    (
        FiniteDistribution::from_weights(space.clone(), train).expect("train"),
        FiniteDistribution::from_weights(space, test).expect("test"),
    )
}

/// Every boolean function on `{0,1}^n`.
pub fn full_binary_class(n: usize) -> HypothesisClass {
    HypothesisClass::all_functions(FeatureSpace::binary(n).expect("space")).expect("class")
}
