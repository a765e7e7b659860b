//! Per-treebank analysis: grouping by sentence length, the correlation
//! summary and the meta-analysis across treebanks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::metrics::SentenceMetrics;
use crate::par::Execution;
use crate::rng::RandomSource;
use crate::stats::{fisher_randomization_mean, monte_carlo_p_tau, FisherTest, PermutationTest};
use crate::{Error, Result};

/// Shortest sentence length with possible crossings.
pub const MIN_LENGTH: usize = 4;

/// `D` and `C` of the sentences of one length, paired by sentence in corpus order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthGroup {
    pub n: usize,
    pub d: Vec<u64>,
    pub c: Vec<u64>,
}

impl LengthGroup {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn all_planar(&self) -> bool {
        self.c.iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionReport {
    /// Lengths below [`MIN_LENGTH`] with their sentence counts.
    pub too_short: BTreeMap<usize, usize>,
    /// Lengths represented by a single sentence.
    pub singletons: Vec<usize>,
}

impl ExclusionReport {
    pub fn excluded_lengths(&self) -> usize {
        self.too_short.len() + self.singletons.len()
    }
}

/// Groups metrics by `n`, dropping lengths below 4 (no crossings possible)
/// and lengths with fewer than two sentences (tau undefined).
pub fn group_by_length(metrics: &[SentenceMetrics]) -> (Vec<LengthGroup>, ExclusionReport) {
    let mut by_n: BTreeMap<usize, LengthGroup> = BTreeMap::new();
    for m in metrics {
        let g = by_n.entry(m.n).or_insert_with(|| LengthGroup {
            n: m.n,
            d: Vec::new(),
            c: Vec::new(),
        });
        g.d.push(m.d);
        g.c.push(m.c);
    }
    let mut report = ExclusionReport::default();
    let mut groups = Vec::new();
    for (n, g) in by_n {
        if n < MIN_LENGTH {
            report.too_short.insert(n, g.len());
        } else if g.len() < 2 {
            report.singletons.push(n);
        } else {
            groups.push(g);
        }
    }
    (groups, report)
}

/// Which sentences `S` and the mean length are computed over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SentenceScope {
    /// Every sentence that passed tree validation.
    #[default]
    Accepted,
    /// Only sentences in analyzed length groups.
    Analyzed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SummaryOptions {
    pub replicas: u64,
    pub scope: SentenceScope,
    pub exec: Execution,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        SummaryOptions {
            replicas: crate::stats::DEFAULT_REPLICAS,
            scope: SentenceScope::default(),
            exec: Execution::default(),
        }
    }
}

/// One treebank's row of the correlation summary.
///
/// Proportions are over the `M` analyzed lengths. They are `None` when no
/// length survives the exclusions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreebankSummary {
    pub name: String,
    pub m: usize,
    pub tau_zero: usize,
    pub tau_pos: usize,
    pub all_planar: usize,
    pub p_tau_zero: Option<f64>,
    pub p_tau_pos: Option<f64>,
    pub p_value: Option<f64>,
    pub p0: Option<f64>,
    pub replicas: u64,
    pub exceed: Option<u64>,
    pub s: usize,
    pub mean_n: Option<f64>,
    pub excluded_lengths: usize,
}

impl TreebankSummary {
    pub fn is_defined(&self) -> bool {
        self.m > 0
    }
}

pub fn treebank_summary(
    name: &str,
    groups: &[LengthGroup],
    exclusions: &ExclusionReport,
    metrics: &[SentenceMetrics],
    options: &SummaryOptions,
    source: &RandomSource,
) -> Result<TreebankSummary> {
    let (s, total_n) = match options.scope {
        SentenceScope::Accepted => (metrics.len(), metrics.iter().map(|m| m.n).sum::<usize>()),
        SentenceScope::Analyzed => (
            groups.iter().map(|g| g.len()).sum(),
            groups.iter().map(|g| g.n * g.len()).sum(),
        ),
    };
    let mean_n = (s > 0).then(|| total_n as f64 / s as f64);
    let m = groups.len();
    let all_planar = groups.iter().filter(|g| g.all_planar()).count();

    let mut summary = TreebankSummary {
        name: name.to_string(),
        m,
        tau_zero: 0,
        tau_pos: 0,
        all_planar,
        p_tau_zero: None,
        p_tau_pos: None,
        p_value: None,
        p0: None,
        replicas: options.replicas,
        exceed: None,
        s,
        mean_n,
        excluded_lengths: exclusions.excluded_lengths(),
    };
    if m == 0 {
        log::warn!("{name}: no sentence length survives the exclusions");
        return Ok(summary);
    }
    let test: PermutationTest = monte_carlo_p_tau(groups, options.replicas, source, options.exec)?;
    summary.tau_zero = test.observed_zero;
    summary.tau_pos = test.observed_pos;
    summary.p_tau_zero = Some(test.p_zero());
    summary.p_tau_pos = Some(test.p_pos());
    summary.p_value = Some(test.p_value());
    summary.exceed = Some(test.exceed);
    summary.p0 = Some(all_planar as f64 / m as f64);
    Ok(summary)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    P0,
    S,
    M,
    MeanN,
}

impl Feature {
    pub const ALL: [Feature; 4] = [Feature::P0, Feature::S, Feature::M, Feature::MeanN];

    pub fn of(self, summary: &TreebankSummary) -> Option<f64> {
        match self {
            Feature::P0 => summary.p0,
            Feature::S => Some(summary.s as f64),
            Feature::M => Some(summary.m as f64),
            Feature::MeanN => summary.mean_n,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feature::P0 => "p0",
            Feature::S => "S",
            Feature::M => "M",
            Feature::MeanN => "mean_n",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureTest {
    pub feature: Feature,
    pub mean: f64,
    pub left_p: f64,
    pub right_p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaAnalysisResult {
    pub subset: Vec<String>,
    pub total: usize,
    pub replicas: u64,
    pub features: Vec<FeatureTest>,
}

/// Indices of the treebanks where `p(tau >= 0)` is not significant, i.e.
/// `p_value > alpha`. Treebanks without a p-value are never included.
pub fn non_rejected(summaries: &[TreebankSummary], alpha: f64) -> Vec<usize> {
    summaries
        .iter()
        .enumerate()
        .filter(|(_, s)| s.p_value.is_some_and(|p| p > alpha))
        .map(|(i, _)| i)
        .collect()
}

/// Fisher randomization tests of each feature's mean over `subset` against
/// random subsets of the same size. Feature `i` uses stream `i` of `source`.
pub fn meta_analysis(
    summaries: &[TreebankSummary],
    subset: &[usize],
    replicas: u64,
    source: &RandomSource,
    exec: Execution,
) -> Result<MetaAnalysisResult> {
    if summaries.len() < 2 {
        return Err(Error::degenerate(format!(
            "the meta-analysis needs at least two treebanks, got {}",
            summaries.len()
        )));
    }
    if subset.is_empty() {
        return Err(Error::degenerate("empty non-rejected subset"));
    }
    if subset.len() >= summaries.len() {
        return Err(Error::degenerate(
            "every treebank is in the non-rejected subset; there is nothing to compare against",
        ));
    }
    let mut features = Vec::new();
    for (i, feature) in Feature::ALL.into_iter().enumerate() {
        let values = summaries
            .iter()
            .map(|s| {
                feature.of(s).ok_or_else(|| {
                    Error::domain(format!("{feature} is undefined for treebank {}", s.name))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let test: FisherTest =
            fisher_randomization_mean(&values, subset, replicas, &source.with_stream(i as u64), exec)?;
        features.push(FeatureTest {
            feature,
            mean: test.observed_mean,
            left_p: test.left(),
            right_p: test.right(),
        });
    }
    Ok(MetaAnalysisResult {
        subset: subset.iter().map(|&i| summaries[i].name.clone()).collect(),
        total: summaries.len(),
        replicas,
        features,
    })
}
