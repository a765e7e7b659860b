//! Sequential and rayon-backed execution of the data-parallel loops.
//!
//! Every parallel loop in the crate is an indexed map whose items only depend
//! on their index (and on a random substream derived from it), so both modes
//! produce identical results.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Runs on the rayon pool. Falls back to sequential execution when the
    /// crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if is_parallel_available() {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[inline]
pub fn is_parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Sizes the global rayon pool. A no-op without the `parallel` feature.
///
/// Returns an error if the pool was already initialized.
pub fn configure_threads(jobs: usize) -> crate::Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| crate::Error::Config(e.to_string()))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        Ok(())
    }
}

impl Execution {
    /// Maps `f` over `0..count`, preserving index order in the output.
    pub fn map_indexed<U, F>(self, count: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(f).collect()
            }
            _ => (0..count).map(f).collect(),
        }
    }

    pub fn map_slice<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Counts the indices in `0..count` for which `pred` holds.
    pub fn count_where<F>(self, count: u64, pred: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..count).into_par_iter().filter(|&i| pred(i)).count() as u64
            }
            _ => (0..count).filter(|&i| pred(i)).count() as u64,
        }
    }

    /// Counts, for each of `K` predicates evaluated together, the indices in
    /// `0..count` where it holds.
    pub fn tally<const K: usize, F>(self, count: u64, f: F) -> [u64; K]
    where
        F: Fn(u64) -> [bool; K] + Sync + Send,
    {
        let add = |mut acc: [u64; K], hits: [bool; K]| {
            for (a, h) in acc.iter_mut().zip(hits) {
                *a += h as u64;
            }
            acc
        };
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..count)
                    .into_par_iter()
                    .fold(|| [0u64; K], |acc, i| add(acc, f(i)))
                    .reduce(
                        || [0u64; K],
                        |mut a, b| {
                            for (x, y) in a.iter_mut().zip(b) {
                                *x += y;
                            }
                            a
                        },
                    )
            }
            _ => (0..count).fold([0u64; K], |acc, i| add(acc, f(i))),
        }
    }

    /// Like [`Execution::count_where`], with a per-worker scratch value.
    pub fn count_where_with<S, I, F>(self, count: u64, init: I, pred: F) -> u64
    where
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..count)
                    .into_par_iter()
                    .map_init(&init, |scratch, i| pred(scratch, i) as u64)
                    .sum()
            }
            _ => {
                let mut scratch = init();
                (0..count).filter(|&i| pred(&mut scratch, i)).count() as u64
            }
        }
    }
}
