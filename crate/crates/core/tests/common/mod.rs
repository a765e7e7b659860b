//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's own counting code.

#![allow(dead_code)]

use std::path::PathBuf;

use depcross::tree::DepTree;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Edges as `(dependent, head)` position pairs, read straight off the head vector.
pub fn arcs(tree: &DepTree) -> Vec<(usize, usize)> {
    tree.heads()
        .iter()
        .enumerate()
        .filter(|(_, &h)| h != 0)
        .map(|(i, &h)| (i + 1, h))
        .collect()
}

/// Two arcs cross when exactly one endpoint of the second lies strictly
/// inside the span of the first and no endpoint is shared.
pub fn brute_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let (lo, hi) = (a.0.min(a.1), a.0.max(a.1));
    if b.0 == a.0 || b.0 == a.1 || b.1 == a.0 || b.1 == a.1 {
        return false;
    }
    let inside = |p: usize| lo < p && p < hi;
    inside(b.0) != inside(b.1)
}

pub fn brute_crossings(tree: &DepTree) -> u64 {
    let e = arcs(tree);
    let mut c = 0;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            c += brute_cross(e[i], e[j]) as u64;
        }
    }
    c
}

pub fn brute_d(tree: &DepTree) -> u64 {
    arcs(tree).iter().map(|&(a, b)| a.abs_diff(b) as u64).sum()
}

/// Pairs of arcs with four distinct endpoints.
pub fn brute_q(tree: &DepTree) -> u64 {
    let e = arcs(tree);
    let mut q = 0;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let (a, b) = (e[i], e[j]);
            q += (a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1) as u64;
        }
    }
    q
}

/// All permutations of `0..m` (Heap's algorithm).
pub fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    let mut out = Vec::new();
    heap(m, &mut (0..m).collect(), &mut out);
    out
}

/// Every Prüfer sequence over `1..=n` of length `n - 2`.
pub fn all_prufer_codes(n: usize) -> Vec<Vec<usize>> {
    let mut codes = vec![Vec::new()];
    for _ in 0..n.saturating_sub(2) {
        codes = codes
            .into_iter()
            .flat_map(|c| {
                (1..=n).map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    codes
}

/// Head vector of the labeled tree with edge list `edges`, rooted at 1.
pub fn heads_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut heads = vec![usize::MAX; n];
    heads[0] = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            for (u, v) in [(a, b), (b, a)] {
                if heads[u - 1] != usize::MAX && heads[v - 1] == usize::MAX {
                    heads[v - 1] = u;
                    changed = true;
                }
            }
        }
    }
    heads
}

/// Every labeled tree on `n` vertices, as sorted edge lists, decoded with a
/// quadratic minimum-leaf scan.
pub fn all_labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    all_prufer_codes(n)
        .into_iter()
        .map(|code| {
            let mut degree = vec![1; n + 1];
            for &v in &code {
                degree[v] += 1;
            }
            let mut edges = Vec::new();
            for &v in &code {
                let leaf = (1..=n).find(|&u| degree[u] == 1).unwrap();
                edges.push((leaf.min(v), leaf.max(v)));
                degree[leaf] = 0;
                degree[v] -= 1;
            }
            let rest: Vec<usize> = (1..=n).filter(|&u| degree[u] == 1).collect();
            edges.push((rest[0], rest[1]));
            edges.sort();
            edges
        })
        .collect()
}

/// `(concordant, discordant, total)` by direct pair enumeration.
pub fn brute_kendall(x: &[i64], y: &[i64]) -> (u64, u64, u64) {
    let (mut nc, mut nd, mut n0) = (0, 0, 0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            n0 += 1;
            let s = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
            if s > 0 {
                nc += 1;
            } else if s < 0 {
                nd += 1;
            }
        }
    }
    (nc, nd, n0)
}

/// All `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut with_last = combinations(n - 1, k - 1);
    for c in &mut with_last {
        c.push(n - 1);
    }
    let mut out = combinations(n - 1, k);
    out.extend(with_last);
    out
}

/// Exact `P(tau(c, permuted d) >= 0)` over all permutations of `d`.
pub fn exact_nonneg_probability(d: &[i64], c: &[i64]) -> f64 {
    exact_nonneg_probability_over(&all_permutations(d.len()), d, c)
}

/// As [`exact_nonneg_probability`], with the permutations of `0..d.len()` supplied.
pub fn exact_nonneg_probability_over(perms: &[Vec<usize>], d: &[i64], c: &[i64]) -> f64 {
    let mut y = d.to_vec();
    let hits = perms
        .iter()
        .filter(|p| {
            for (slot, &i) in y.iter_mut().zip(p.iter()) {
                *slot = d[i];
            }
            let (nc, nd, _) = brute_kendall(c, &y);
            nc >= nd
        })
        .count();
    hits as f64 / perms.len() as f64
}
