//! Preprocessing and validation of dependency trees.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ingest::{RawSentence, RawToken, TokenClass};
use crate::metrics::Edge;

/// A rooted tree over the positions `1..=n` of a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepTree {
    // heads[i] is the governor of position i + 1; 0 marks the root.
    heads: Vec<usize>,
    source_id: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    Empty,
    MultiRoot,
    Cycle,
    /// A head points outside the sentence.
    Disconnected,
}

impl Rejection {
    pub fn as_str(self) -> &'static str {
        match self {
            Rejection::Empty => "empty",
            Rejection::MultiRoot => "multi-root",
            Rejection::Cycle => "cycle",
            Rejection::Disconnected => "disconnected",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl DepTree {
    /// Validates a head vector (1-based governor positions, 0 for the root).
    pub fn from_heads(heads: Vec<usize>, source_id: impl Into<String>) -> Result<DepTree, Rejection> {
        let n = heads.len();
        if n == 0 {
            return Err(Rejection::Empty);
        }
        if heads.iter().enumerate().any(|(i, &h)| h > n || h == i + 1) {
            // A self loop is the smallest cycle.
            return Err(if heads.iter().any(|&h| h > n) {
                Rejection::Disconnected
            } else {
                Rejection::Cycle
            });
        }
        if heads.iter().filter(|&&h| h == 0).count() > 1 {
            return Err(Rejection::MultiRoot);
        }
        // Every vertex must reach a root. 0 = unvisited, 1 = on current walk, 2 = reaches root.
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        let mut walk = Vec::new();
        for start in 1..=n {
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                walk.push(v);
                v = heads[v - 1];
            }
            if state[v] == 1 {
                return Err(Rejection::Cycle);
            }
            for u in walk.drain(..) {
                state[u] = 2;
            }
        }
        Ok(DepTree {
            heads,
            source_id: source_id.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.heads.len()
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn head_of(&self, position: usize) -> usize {
        self.heads[position - 1]
    }

    pub fn root(&self) -> usize {
        self.heads.iter().position(|&h| h == 0).map(|i| i + 1).unwrap()
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    /// The `n - 1` dependencies, normalized so that `left < right`, in the
    /// order of their dependents.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.heads
            .iter()
            .enumerate()
            .filter(|(_, &h)| h != 0)
            .map(|(i, &h)| Edge::new(i + 1, h))
    }

    /// Undirected degrees indexed by position - 1.
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n()];
        for e in self.edges() {
            deg[e.left - 1] += 1;
            deg[e.right - 1] += 1;
        }
        deg
    }

    /// Moves the vertex at position `p` to position `perm[p - 1]`.
    ///
    /// `perm` must be a permutation of `1..=n`.
    pub fn relinearize(&self, perm: &[usize]) -> DepTree {
        assert_eq!(perm.len(), self.n(), "permutation length");
        let mut heads = vec![0; self.n()];
        for (i, &h) in self.heads.iter().enumerate() {
            heads[perm[i] - 1] = if h == 0 { 0 } else { perm[h - 1] };
        }
        DepTree {
            heads,
            source_id: self.source_id.clone(),
        }
    }

    /// The same tree read right to left.
    pub fn reversed(&self) -> DepTree {
        let n = self.n();
        let perm: Vec<usize> = (1..=n).map(|p| n + 1 - p).collect();
        self.relinearize(&perm)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneReport {
    pub removed_punct: usize,
    pub removed_null: usize,
    pub reattached: usize,
    /// Set when a governor chain loops through removed tokens.
    pub dropped_nontree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pruned {
    pub sentence: RawSentence,
    pub report: PruneReport,
}

/// Removes punctuation and null tokens, re-heading each survivor to its
/// nearest surviving ancestor and re-indexing survivors in linear order.
///
/// A survivor whose ancestors were all removed (or whose governor chain
/// returns to itself through removed tokens) becomes a root; tree validation
/// decides whether the result is still a tree.
pub fn prune_and_reattach(sentence: &RawSentence) -> Pruned {
    let tokens = &sentence.tokens;
    let n = tokens.len();
    let mut report = PruneReport::default();
    // new_index[p] for original position p; 0 for removed tokens and for p = 0
    let mut new_index = vec![0usize; n + 1];
    let mut next = 0;
    for t in tokens {
        match t.class {
            TokenClass::Punctuation => report.removed_punct += 1,
            TokenClass::Null => report.removed_null += 1,
            TokenClass::Regular => {
                next += 1;
                new_index[t.index] = next;
            }
        }
    }

    let head_of = |p: usize| tokens[p - 1].head;
    let mut survivors = Vec::with_capacity(next);
    for t in tokens.iter().filter(|t| t.class == TokenClass::Regular) {
        let mut h = t.head;
        let mut steps = 0;
        while h != 0 && new_index[h] == 0 {
            if steps == n {
                report.dropped_nontree = true;
                h = 0;
                break;
            }
            h = head_of(h);
            steps += 1;
        }
        if h == t.index {
            // the chain came back to the token itself: no surviving ancestor
            h = 0;
        }
        if h != t.head {
            report.reattached += 1;
        }
        survivors.push(RawToken {
            index: new_index[t.index],
            form: t.form.clone(),
            pos_tag: t.pos_tag.clone(),
            head: new_index[h],
            class: TokenClass::Regular,
        });
    }

    Pruned {
        sentence: RawSentence {
            tokens: survivors,
            source_id: sentence.source_id.clone(),
        },
        report,
    }
}

/// Validates a pruned sentence.
pub fn build_tree(pruned: &Pruned) -> Result<DepTree, Rejection> {
    if pruned.sentence.is_empty() {
        return Err(Rejection::Empty);
    }
    if pruned.report.dropped_nontree {
        return Err(Rejection::Cycle);
    }
    let heads = pruned.sentence.tokens.iter().map(|t| t.head).collect();
    DepTree::from_heads(heads, pruned.sentence.source_id.clone())
}
