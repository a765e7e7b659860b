use std::cmp::Ordering;
use std::ops::Range;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::kendall::{concordance_x_sorted, kendall_tau, pair_counts, BRUTE_FORCE_MAX};
use crate::par::Execution;
use crate::pipeline::LengthGroup;
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Outcome of the Monte Carlo test on `p(tau >= 0)`, the proportion of length
/// groups whose Kendall tau between `D` and `C` is non-negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationTest {
    pub groups: usize,
    pub observed_zero: usize,
    pub observed_pos: usize,
    pub replicas: u64,
    /// Replicas whose randomized count of non-negative taus reached the observed one.
    pub exceed: u64,
}

impl PermutationTest {
    pub fn observed_nonneg(&self) -> usize {
        self.observed_zero + self.observed_pos
    }

    pub fn p_nonneg(&self) -> f64 {
        self.observed_nonneg() as f64 / self.groups as f64
    }

    pub fn p_zero(&self) -> f64 {
        self.observed_zero as f64 / self.groups as f64
    }

    pub fn p_pos(&self) -> f64 {
        self.observed_pos as f64 / self.groups as f64
    }

    /// Fraction of replicas with `p_c(tau >= 0) >= p(tau >= 0)`.
    pub fn p_value(&self) -> f64 {
        self.exceed as f64 / self.replicas as f64
    }
}

/// Groups up to this size get a table of tau signs over all `m!` pairings.
const TABLE_MAX: usize = 6;

/// A group laid out for repeated randomization: `C` sorted, `D` as a multiset.
struct PreparedGroup {
    c_sorted: Vec<u64>,
    d: Vec<u64>,
    /// Runs of equal `C` in `c_sorted`.
    c_blocks: Vec<Range<usize>>,
    /// Tau is zero under every permutation when either vector is constant.
    always_zero: bool,
    /// For small groups, whether tau >= 0 under each of the `m!` permutations
    /// of `D`, in lexicographic order.
    nonneg_table: Option<Vec<bool>>,
}

impl PreparedGroup {
    fn new(group: &LengthGroup) -> PreparedGroup {
        let mut c_sorted = group.c.clone();
        c_sorted.sort_unstable();
        let mut c_blocks = Vec::new();
        let mut start = 0;
        for i in 1..=c_sorted.len() {
            if i == c_sorted.len() || c_sorted[i] != c_sorted[start] {
                c_blocks.push(start..i);
                start = i;
            }
        }
        let d_constant = group.d.windows(2).all(|w| w[0] == w[1]);
        let always_zero = c_blocks.len() == 1 || d_constant;
        let nonneg_table = (!always_zero && group.d.len() <= TABLE_MAX).then(|| {
            let mut y = group.d.clone();
            permutations(group.d.len())
                .iter()
                .map(|perm| {
                    for (slot, &i) in y.iter_mut().zip(perm) {
                        *slot = group.d[i];
                    }
                    let (nc, nd) = pair_counts(&c_sorted, &y);
                    nc >= nd
                })
                .collect()
        });
        PreparedGroup {
            always_zero,
            c_sorted,
            d: group.d.clone(),
            c_blocks,
            nonneg_table,
        }
    }

    /// Whether tau >= 0 after pairing `C` with a uniformly random permutation of `D`.
    fn randomized_nonneg(&self, rng: &mut impl rand::Rng, scratch: &mut Scratch) -> bool {
        match &self.nonneg_table {
            Some(table) => table[rng.random_range(0..table.len())],
            None => self.randomized_sign(rng, scratch) != Ordering::Less,
        }
    }

    /// Sign of tau after pairing `C` with a uniformly random permutation of `D`.
    fn randomized_sign(&self, rng: &mut impl rand::Rng, scratch: &mut Scratch) -> Ordering {
        if self.always_zero {
            return Ordering::Equal;
        }
        let y = &mut scratch.y;
        y.clear();
        y.extend_from_slice(&self.d);
        y.shuffle(rng);
        let (nc, nd) = if y.len() <= BRUTE_FORCE_MAX {
            pair_counts(&self.c_sorted, y)
        } else {
            for block in &self.c_blocks {
                y[block.clone()].sort_unstable();
            }
            concordance_x_sorted(&self.c_sorted, y, &mut scratch.buf)
        };
        nc.cmp(&nd)
    }
}

/// All permutations of `0..m` in lexicographic order.
fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        out.push(perm.clone());
        // next lexicographic permutation
        let Some(i) = (1..m).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

#[derive(Default)]
struct Scratch {
    y: Vec<u64>,
    buf: Vec<u64>,
}

/// Monte Carlo significance of `p(tau >= 0)`.
///
/// Each replica replaces every group's `D` vector by a uniformly random
/// permutation (with `C` fixed) and recounts the non-negative taus. The
/// p-value is the fraction of replicas whose count is at least the observed
/// one. Replica `r` of group `g` draws from substream `(g, r)` of `source`, so
/// the result does not depend on `exec`.
pub fn monte_carlo_p_tau(
    groups: &[LengthGroup],
    replicas: u64,
    source: &RandomSource,
    exec: Execution,
) -> Result<PermutationTest> {
    if groups.is_empty() {
        return Err(Error::domain("the permutation test needs at least one length group"));
    }
    if replicas == 0 {
        return Err(Error::domain("the permutation test needs at least one replica"));
    }
    let (mut observed_zero, mut observed_pos) = (0, 0);
    for g in groups {
        match kendall_tau(&g.d, &g.c)?.sign() {
            Ordering::Equal => observed_zero += 1,
            Ordering::Greater => observed_pos += 1,
            Ordering::Less => {}
        }
    }
    let observed_nonneg = observed_zero + observed_pos;

    let prepared: Vec<PreparedGroup> = groups.iter().map(PreparedGroup::new).collect();
    let fixed_nonneg = prepared.iter().filter(|p| p.always_zero).count();
    let varying: Vec<(u64, &PreparedGroup)> = prepared
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.always_zero)
        .map(|(i, p)| (i as u64, p))
        .collect();

    let exceed = exec.count_where_with(replicas, Scratch::default, |scratch, r| {
        let mut nonneg = fixed_nonneg;
        for (g, group) in &varying {
            let mut rng = source.substream(*g, r);
            if group.randomized_nonneg(&mut rng, scratch) {
                nonneg += 1;
            }
        }
        nonneg >= observed_nonneg
    });

    Ok(PermutationTest {
        groups: groups.len(),
        observed_zero,
        observed_pos,
        replicas,
        exceed,
    })
}
