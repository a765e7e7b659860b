//! Statistical machinery: Kendall tau, the Monte Carlo permutation test on the
//! proportion of non-negative correlations, and the Fisher randomization test
//! on subset means.

mod fisher;
mod kendall;
mod permutation;

pub use fisher::{fisher_randomization_mean, FisherTest};
pub use kendall::{kendall_tau, TauResult};
pub use permutation::{monte_carlo_p_tau, PermutationTest};

/// Default number of randomizations of the permutation test.
pub const DEFAULT_REPLICAS: u64 = 10_000;
/// Default number of replicas of the Fisher randomization test.
pub const DEFAULT_META_REPLICAS: u64 = 1_000_000;
pub const DEFAULT_ALPHA: f64 = 0.05;
