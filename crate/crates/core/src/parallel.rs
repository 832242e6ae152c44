//! Data-parallel helpers. With the `parallel` feature (on by default) work
//! is spread over the rayon pool; without it everything runs in order on
//! the calling thread. Output order always matches input order.

use crate::derived::{evaluate_metric, BenchmarkInput, SuiteMember};
use crate::error::Result;
use crate::types::{EvaluationPolicy, MetricResult, SeriesPair};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the feature is enabled.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Always-sequential counterpart of [`map`].
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// One row per pair, one entry per metric, in the given orders.
pub type BatchResults = Vec<Vec<Result<MetricResult>>>;

fn evaluate_row(
    pair: &SeriesPair,
    metrics: &[SuiteMember],
    aux: &[BenchmarkInput],
    policy: &EvaluationPolicy,
) -> Vec<Result<MetricResult>> {
    metrics
        .iter()
        .map(|m| evaluate_metric(pair, m, aux, policy))
        .collect()
}

/// Evaluates every metric on every pair, parallel across pairs.
pub fn evaluate_batch(
    pairs: &[SeriesPair],
    metrics: &[SuiteMember],
    aux: &[BenchmarkInput],
    policy: &EvaluationPolicy,
) -> BatchResults {
    map(pairs, |p| evaluate_row(p, metrics, aux, policy))
}

pub fn evaluate_batch_sequential(
    pairs: &[SeriesPair],
    metrics: &[SuiteMember],
    aux: &[BenchmarkInput],
    policy: &EvaluationPolicy,
) -> BatchResults {
    map_sequential(pairs, |p| evaluate_row(p, metrics, aux, policy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        assert_eq!(map(&items, |x| x * 2), map_sequential(&items, |x| x * 2));
    }

    #[test]
    fn batch_matches_sequential() {
        let pairs: Vec<SeriesPair> = (1..20)
            .map(|k| {
                let k = k as f64;
                SeriesPair::new(
                    vec![1.0 * k, 2.0, 3.0 + k, 4.0],
                    vec![2.0, 2.0 * k, 5.0, 3.0],
                )
                .unwrap()
            })
            .collect();
        let metrics: Vec<SuiteMember> = ["MAE", "RMSE", "MAPE", "GMAE", "MdSA"]
            .iter()
            .map(|m| SuiteMember::new(*m))
            .collect();
        let policy = EvaluationPolicy::fail_fast();
        assert_eq!(
            evaluate_batch(&pairs, &metrics, &[], &policy),
            evaluate_batch_sequential(&pairs, &metrics, &[], &policy)
        );
    }
}
