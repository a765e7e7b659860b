//! Synthetic trees and linear arrangements.

use std::collections::{BinaryHeap, VecDeque};
use std::cmp::Reverse;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::tree::DepTree;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeKind {
    Star,
    Linear,
    UniformRandom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub kind: TreeKind,
    pub n: usize,
    /// Hub position for stars.
    pub hub: Option<usize>,
    /// Vertex order for linear trees.
    pub order: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl TreeSpec {
    /// Builds the tree described by the spec. Stars default to a hub at
    /// position 1, linear trees to the identity order. Random trees draw from
    /// `rng`.
    pub fn build(&self, rng: &mut impl Rng) -> Result<DepTree> {
        match self.kind {
            TreeKind::Star => make_star(self.n, self.hub.unwrap_or(1)),
            TreeKind::Linear => match &self.order {
                Some(order) => make_linear(self.n, order),
                None => make_linear(self.n, &(1..=self.n).collect::<Vec<_>>()),
            },
            TreeKind::UniformRandom => make_uniform_random_tree(self.n, rng),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("generated trees need n >= 2, got {n}")));
    }
    Ok(())
}

fn validated(heads: Vec<usize>, id: String) -> DepTree {
    DepTree::from_heads(heads, id).expect("generator produced an invalid tree")
}

/// Star rooted at its hub.
pub fn make_star(n: usize, hub: usize) -> Result<DepTree> {
    check_size(n)?;
    if !(1..=n).contains(&hub) {
        return Err(Error::domain(format!("hub {hub} outside 1..={n}")));
    }
    let heads = (1..=n).map(|p| if p == hub { 0 } else { hub }).collect();
    Ok(validated(heads, format!("star-n{n}-hub{hub}")))
}

/// Path visiting positions in `order`, rooted at `order[0]`.
pub fn make_linear(n: usize, order: &[usize]) -> Result<DepTree> {
    check_size(n)?;
    let mut seen = vec![false; n + 1];
    if order.len() != n || order.iter().any(|&p| p == 0 || p > n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::domain(format!("{order:?} is not a permutation of 1..={n}")));
    }
    let mut heads = vec![0; n];
    for w in order.windows(2) {
        heads[w[1] - 1] = w[0];
    }
    Ok(validated(heads, format!("linear-n{n}")))
}

/// Uniformly random labeled tree on `n` vertices, decoded from a uniformly
/// random Prüfer sequence, with a uniformly random root. Labels are positions.
pub fn make_uniform_random_tree(n: usize, rng: &mut impl Rng) -> Result<DepTree> {
    check_size(n)?;
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(1..=n)).collect();
    let adjacency = prufer_decode(n, &code);
    let root = rng.random_range(1..=n);
    Ok(validated(orient(&adjacency, root), format!("random-n{n}")))
}

/// Edges of the labeled tree with the given Prüfer sequence, as adjacency
/// lists indexed by label (index 0 unused).
pub fn prufer_decode(n: usize, code: &[usize]) -> Vec<Vec<usize>> {
    debug_assert_eq!(code.len(), n - 2);
    let mut degree = vec![1usize; n + 1];
    for &v in code {
        degree[v] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (1..=n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut adjacency = vec![Vec::new(); n + 1];
    let mut link = |a: usize, b: usize| {
        adjacency[a].push(b);
        adjacency[b].push(a);
    };
    for &v in code {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        link(leaf, v);
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    link(a, b);
    adjacency
}

fn orient(adjacency: &[Vec<usize>], root: usize) -> Vec<usize> {
    let n = adjacency.len() - 1;
    let mut heads = vec![usize::MAX; n];
    heads[root - 1] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &u in &adjacency[v] {
            if heads[u - 1] == usize::MAX {
                heads[u - 1] = v;
                queue.push_back(u);
            }
        }
    }
    heads
}

/// The same tree with its vertices placed in a uniformly random order.
pub fn shuffle_linearization(tree: &DepTree, rng: &mut impl Rng) -> DepTree {
    let mut perm: Vec<usize> = (1..=tree.n()).collect();
    perm.shuffle(rng);
    tree.relinearize(&perm)
}
