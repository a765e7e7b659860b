//! Crossings versus dependency lengths in dependency treebanks.
//!
//! The crate covers the full pipeline from CoNLL treebank files to per-treebank
//! summaries:
//!
//! - [`ingest`] parses CoNLL-X style files and classifies tokens,
//! - [`tree`] prunes punctuation and null elements and validates trees,
//! - [`metrics`] computes the sum of dependency lengths `D`, the crossing count `C`,
//!   the number of potentially crossing edge pairs `|Q|` and the degree second moment,
//! - [`stats`] implements Kendall tau (tau-a), the Monte Carlo permutation test on
//!   `p(tau >= 0)` and the Fisher randomization test on subset means,
//! - [`pipeline`] groups sentences by length and assembles treebank summaries,
//! - [`generators`] builds star, linear and uniformly random labeled trees,
//! - [`report`] renders TSV and JSON reports.
//!
//! Data-parallel loops (sentences, replicas) run on rayon when the `parallel`
//! feature is enabled; see [`par::Execution`].

pub mod corpus;
pub mod error;
pub mod generators;
pub mod ingest;
pub mod metrics;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use par::Execution;
pub use rng::RandomSource;
