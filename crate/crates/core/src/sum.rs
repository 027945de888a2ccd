//! Order-fixed reductions.
//!
//! Per-node contributions are always materialized first and then reduced by a
//! pairwise tree whose shape depends only on the slice length, so the result
//! does not depend on how many worker threads produced the contributions.

use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Pairwise tree over materialized contributions; bit-stable across thread counts.
    #[default]
    Deterministic,
    /// Rayon's work-stealing reduction; faster but split-dependent in the last bits.
    Fast,
}

const LEAF: usize = 16;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn reduce(xs: &[f64], mode: Summation) -> f64 {
    match mode {
        Summation::Deterministic => pairwise_sum(xs),
        Summation::Fast => xs.par_iter().sum(),
    }
}

/// Maps `f` over `0..n` in parallel and collects the results in index order.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_exact_values() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn tree_shape_is_thread_independent() {
        let xs: Vec<f64> = (0..4097).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| reduce(&par_map(xs.len(), |i| xs[i] * 3.0), Summation::Deterministic));
        let b = four.install(|| reduce(&par_map(xs.len(), |i| xs[i] * 3.0), Summation::Deterministic));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
