//! Per-sentence quantities: dependency length sum, crossings, potentially
//! crossing pairs and the degree second moment, with the bounds relating them.
//!
//! All bound arithmetic is exact. With `K = sum of squared degrees`, the
//! identities used below are
//!
//! - `<k^2> = K / n`,
//! - `|Q| = (n/2)(n - 1 - <k^2>) = (n(n - 1) - K) / 2` for trees,
//! - `|Q| <= (n/2)(n - 5) + 3 = (n(n - 5) + 6) / 2`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::tree::DepTree;
use crate::{Error, Result};

/// A dependency as a pair of positions with `left < right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
}

impl Edge {
    /// Normalizes an unordered pair of distinct positions.
    pub fn new(a: usize, b: usize) -> Edge {
        debug_assert_ne!(a, b);
        Edge {
            left: a.min(b),
            right: a.max(b),
        }
    }

    pub fn length(&self) -> usize {
        self.right - self.left
    }

    pub fn shares_vertex(&self, other: &Edge) -> bool {
        self.left == other.left
            || self.left == other.right
            || self.right == other.left
            || self.right == other.right
    }
}

/// Arcs drawn above the sentence cross iff their endpoints strictly interleave.
pub fn edges_cross(e1: Edge, e2: Edge) -> bool {
    (e1.left < e2.left && e2.left < e1.right && e1.right < e2.right)
        || (e2.left < e1.left && e1.left < e2.right && e2.right < e1.right)
}

pub fn crossing_count(tree: &DepTree) -> u64 {
    let edges: Vec<Edge> = tree.edges().collect();
    let mut c = 0;
    for (i, &a) in edges.iter().enumerate() {
        for &b in &edges[i + 1..] {
            c += edges_cross(a, b) as u64;
        }
    }
    c
}

pub fn dependency_length_sum(tree: &DepTree) -> u64 {
    tree.edges().map(|e| e.length() as u64).sum()
}

fn sum_squared_degrees(tree: &DepTree) -> u64 {
    tree.degrees().iter().map(|k| k * k).sum()
}

/// `<k^2> = (1/n) sum_v k_v^2` over the undirected tree.
pub fn degree_second_moment(tree: &DepTree) -> Ratio<u64> {
    Ratio::new(sum_squared_degrees(tree), tree.n() as u64)
}

/// Number of unordered edge pairs that share no vertex, by enumeration.
pub fn potential_crossing_pairs(tree: &DepTree) -> u64 {
    let edges: Vec<Edge> = tree.edges().collect();
    let mut q = 0;
    for (i, a) in edges.iter().enumerate() {
        for b in &edges[i + 1..] {
            q += !a.shares_vertex(b) as u64;
        }
    }
    debug_assert_eq!(
        2 * q as i128,
        q_from_degrees(tree.n() as u64, sum_squared_degrees(tree)),
        "|Q| disagrees with (n/2)(n - 1 - <k^2>) for {}",
        tree.source_id()
    );
    q
}

// 2|Q| = n(n - 1) - sum k^2
fn q_from_degrees(n: u64, sum_k2: u64) -> i128 {
    (n as i128) * (n as i128 - 1) - sum_k2 as i128
}

/// `(n/2)(n - 1 - <k^2>)` as an exact rational.
pub fn q_from_second_moment(n: usize, k2: Ratio<u64>) -> Ratio<i64> {
    let n = n as i64;
    let k2 = Ratio::new(*k2.numer() as i64, *k2.denom() as i64);
    Ratio::new(n, 2) * (Ratio::from_integer(n - 1) - k2)
}

/// `(n/2)(n - 5) + 3`, the largest `|Q|` (reached by linear trees).
pub fn crossing_upper_bound(n: usize) -> Result<Ratio<i64>> {
    if n < 2 {
        return Err(Error::domain(format!("crossing bound needs n >= 2, got {n}")));
    }
    let n = n as i64;
    Ok(Ratio::new(n, 2) * Ratio::from_integer(n - 5) + 3)
}

/// Range of `D` over all linear arrangements of a star tree:
/// `(n^2 - (n mod 2)) / 4 <= D <= n(n - 1)/2`.
pub fn star_tree_d_range(n: usize) -> Result<(u64, u64)> {
    if n < 2 {
        return Err(Error::domain(format!("star tree needs n >= 2, got {n}")));
    }
    let n = n as u64;
    Ok(((n * n - n % 2) / 4, n * (n - 1) / 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceMetrics {
    pub source_id: String,
    pub n: usize,
    pub d: u64,
    pub c: u64,
    pub q: u64,
    /// Sum of squared degrees; `<k^2>` is this over `n`.
    pub sum_k2: u64,
}

impl SentenceMetrics {
    pub fn of(tree: &DepTree) -> SentenceMetrics {
        SentenceMetrics {
            source_id: tree.source_id().to_string(),
            n: tree.n(),
            d: dependency_length_sum(tree),
            c: crossing_count(tree),
            q: potential_crossing_pairs(tree),
            sum_k2: sum_squared_degrees(tree),
        }
    }

    pub fn k2(&self) -> Ratio<u64> {
        Ratio::new(self.sum_k2, self.n as u64)
    }
}
