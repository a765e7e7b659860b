use std::cmp::Ordering;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Below this many observations pairs are enumerated directly; above it the
/// counts come from a merge sort.
pub(crate) const BRUTE_FORCE_MAX: usize = 64;

/// Kendall tau-a: `tau = (n_c - n_d) / n_0` where `n_0 = m(m - 1)/2` counts
/// every pair, tied or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TauResult {
    pub n_c: u64,
    pub n_d: u64,
    pub n_0: u64,
}

impl TauResult {
    pub fn tau(&self) -> Ratio<i64> {
        Ratio::new(self.n_c as i64 - self.n_d as i64, self.n_0 as i64)
    }

    pub fn tau_f64(&self) -> f64 {
        (self.n_c as f64 - self.n_d as f64) / self.n_0 as f64
    }

    /// Sign of tau.
    pub fn sign(&self) -> Ordering {
        self.n_c.cmp(&self.n_d)
    }
}

pub fn kendall_tau<T: Ord + Copy>(x: &[T], y: &[T]) -> Result<TauResult> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "kendall tau needs paired samples, got {} and {} values",
            x.len(),
            y.len()
        )));
    }
    let m = x.len();
    if m < 2 {
        return Err(Error::domain(format!(
            "kendall tau is undefined for fewer than two observations (got {m})"
        )));
    }
    let (n_c, n_d) = if m <= BRUTE_FORCE_MAX {
        pair_counts(x, y)
    } else {
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_unstable_by(|&a, &b| x[a].cmp(&x[b]).then(y[a].cmp(&y[b])));
        let xs: Vec<T> = idx.iter().map(|&i| x[i]).collect();
        let mut ys: Vec<T> = idx.iter().map(|&i| y[i]).collect();
        concordance_x_sorted(&xs, &mut ys, &mut Vec::with_capacity(m))
    };
    Ok(TauResult {
        n_c,
        n_d,
        n_0: pairs(m as u64),
    })
}

#[inline]
fn pairs(t: u64) -> u64 {
    t * t.saturating_sub(1) / 2
}

/// `(n_c, n_d)` by enumerating all pairs.
pub(crate) fn pair_counts<T: Ord>(x: &[T], y: &[T]) -> (u64, u64) {
    let (mut nc, mut nd) = (0, 0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            match (x[i].cmp(&x[j]), y[i].cmp(&y[j])) {
                (Ordering::Equal, _) | (_, Ordering::Equal) => {}
                (a, b) if a == b => nc += 1,
                _ => nd += 1,
            }
        }
    }
    (nc, nd)
}

/// Sum over runs of equal adjacent values of `t(t - 1)/2`.
fn tied_pairs<F: Fn(usize, usize) -> bool>(len: usize, same: F) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for i in 1..len {
        if same(i - 1, i) {
            run += 1;
        } else {
            total += pairs(run);
            run = 1;
        }
    }
    if len > 0 {
        total += pairs(run);
    }
    total
}

/// Knight's O(m log m) count of `(n_c, n_d)`.
///
/// `x` must be sorted ascending and `y` sorted ascending within each run of
/// equal `x`. On return `y` is fully sorted.
pub(crate) fn concordance_x_sorted<T: Ord + Copy>(x: &[T], y: &mut [T], buf: &mut Vec<T>) -> (u64, u64) {
    let m = x.len();
    let tied_x = tied_pairs(m, |a, b| x[a] == x[b]);
    let tied_xy = tied_pairs(m, |a, b| x[a] == x[b] && y[a] == y[b]);
    buf.clear();
    buf.extend_from_slice(y);
    let n_d = merge_count(y, buf);
    let tied_y = tied_pairs(m, |a, b| y[a] == y[b]);
    let untied = pairs(m as u64) + tied_xy - tied_x - tied_y;
    (untied - n_d, n_d)
}

/// Sorts `v` and returns the number of strict inversions. `buf` must hold a
/// copy of `v`.
fn merge_count<T: Ord + Copy>(v: &mut [T], buf: &mut [T]) -> u64 {
    let m = v.len();
    if m < 2 {
        return 0;
    }
    let mid = m / 2;
    // sort each half of buf using v as scratch, then merge back into v
    let mut inversions = merge_count(&mut buf[..mid], &mut v[..mid]);
    inversions += merge_count(&mut buf[mid..], &mut v[mid..]);
    let (left, right) = buf.split_at(mid);
    let (mut i, mut j) = (0, 0);
    for slot in v.iter_mut() {
        if j >= right.len() || (i < left.len() && left[i] <= right[j]) {
            *slot = left[i];
            i += 1;
        } else {
            *slot = right[j];
            inversions += (left.len() - i) as u64;
            j += 1;
        }
    }
    inversions
}
