//! Order statistics and binomial intervals for trial summaries.

use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

/// The `ceil(level * T)`-th smallest value (1-based, at least the first).
pub fn order_quantile<T: Ord + Clone>(values: &[T], level: f64) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort();
    let rank = ((level * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1].clone())
}

/// Lower median.
pub fn median<T: Ord + Clone>(values: &[T]) -> Option<T> {
    order_quantile(values, 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialInterval {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
}

/// Two-sided Clopper-Pearson interval.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> BinomialInterval {
    assert!(successes <= trials && trials > 0, "need 0 <= successes <= trials, trials > 0");
    let a = (1.0 - confidence) / 2.0;
    let (x, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).expect("beta").inverse_cdf(a)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).expect("beta").inverse_cdf(1.0 - a)
    };
    BinomialInterval {
        successes,
        trials,
        estimate: x / n,
        lower,
        upper,
        confidence,
    }
}
