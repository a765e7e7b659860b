use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::par::Execution;
use crate::rng::RandomSource;
use crate::{Error, Result};

/// One-sided Fisher randomization test on the mean of a subset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisherTest {
    pub observed_mean: f64,
    pub replicas: u64,
    /// Replicas whose random subset mean is at most the observed mean.
    pub left_count: u64,
    /// Replicas whose random subset mean is at least the observed mean.
    pub right_count: u64,
}

impl FisherTest {
    pub fn left(&self) -> f64 {
        self.left_count as f64 / self.replicas as f64
    }

    pub fn right(&self) -> f64 {
        self.right_count as f64 / self.replicas as f64
    }
}

/// Compares the mean of `values` over `subset` with the means of uniformly
/// random subsets of the same size. Replica `r` draws from substream `(r, 0)`.
///
/// Means are compared through subset sums with a relative tolerance of
/// `1e-12`, so subsets whose means agree up to rounding count on both sides.
pub fn fisher_randomization_mean(
    values: &[f64],
    subset: &[usize],
    replicas: u64,
    source: &RandomSource,
    exec: Execution,
) -> Result<FisherTest> {
    let total = values.len();
    let k = subset.len();
    if k == 0 || k >= total {
        return Err(Error::degenerate(format!(
            "the subset must be non-empty and proper, got {k} of {total} values"
        )));
    }
    if replicas == 0 {
        return Err(Error::domain("the randomization test needs at least one replica"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite value {v}")));
    }
    let mut seen = vec![false; total];
    for &i in subset {
        if i >= total || std::mem::replace(&mut seen[i], true) {
            return Err(Error::domain(format!("invalid or repeated subset index {i}")));
        }
    }

    let observed: f64 = subset.iter().map(|&i| values[i]).sum();
    let tol = 1e-12 * values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    let sums = |r: u64| -> f64 {
        let mut rng = source.substream(r, 0);
        index::sample(&mut rng, total, k).iter().map(|i| values[i]).sum()
    };
    let [left_count, right_count] = exec.tally(replicas, |r| {
        let s = sums(r);
        [s <= observed + tol, s >= observed - tol]
    });

    Ok(FisherTest {
        observed_mean: observed / k as f64,
        replicas,
        left_count,
        right_count,
    })
}
