//! Corpus-level driver: parse, prune, validate and measure every sentence of
//! a treebank, then summarize it.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ingest::{parse_conll, IngestConfig, ParsedCorpus};
use crate::metrics::SentenceMetrics;
use crate::par::Execution;
use crate::pipeline::{group_by_length, treebank_summary, SummaryOptions, TreebankSummary};
use crate::report::AnalyzeReport;
use crate::rng::RandomSource;
use crate::tree::{build_tree, prune_and_reattach, PruneReport, Rejection};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceOutcome {
    pub source_id: String,
    /// Length after pruning.
    pub n: usize,
    pub prune: PruneReport,
    pub rejection: Option<Rejection>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub name: String,
    pub parsed: usize,
    pub skipped_malformed: usize,
    pub removed_punct: usize,
    pub removed_null: usize,
    pub reattached: usize,
    pub accepted: usize,
    pub rejected: BTreeMap<Rejection, usize>,
}

impl ValidationReport {
    pub fn rejected_total(&self) -> usize {
        self.rejected.values().sum()
    }
}

#[derive(Clone, Debug)]
pub struct ProcessedCorpus {
    pub name: String,
    /// Metrics of accepted sentences, in corpus order.
    pub metrics: Vec<SentenceMetrics>,
    pub outcomes: Vec<SentenceOutcome>,
    pub validation: ValidationReport,
}

pub fn process_corpus(name: &str, parsed: &ParsedCorpus, exec: Execution) -> ProcessedCorpus {
    let results = exec.map_slice(&parsed.sentences, |raw| {
        let pruned = prune_and_reattach(raw);
        let outcome = |rejection| SentenceOutcome {
            source_id: raw.source_id.clone(),
            n: pruned.sentence.len(),
            prune: pruned.report,
            rejection,
        };
        match build_tree(&pruned) {
            Ok(tree) => (outcome(None), Some(SentenceMetrics::of(&tree))),
            Err(r) => (outcome(Some(r)), None),
        }
    });

    let mut validation = ValidationReport {
        name: name.to_string(),
        parsed: parsed.sentences.len(),
        skipped_malformed: parsed.skipped.len(),
        ..ValidationReport::default()
    };
    let mut metrics = Vec::with_capacity(results.len());
    let mut outcomes = Vec::with_capacity(results.len());
    for (outcome, m) in results {
        validation.removed_punct += outcome.prune.removed_punct;
        validation.removed_null += outcome.prune.removed_null;
        validation.reattached += outcome.prune.reattached;
        match outcome.rejection {
            Some(r) => *validation.rejected.entry(r).or_default() += 1,
            None => validation.accepted += 1,
        }
        metrics.extend(m);
        outcomes.push(outcome);
    }
    ProcessedCorpus {
        name: name.to_string(),
        metrics,
        outcomes,
        validation,
    }
}

/// Treebank name used in reports: the file name without its extension.
pub fn treebank_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn load_treebank(path: &Path, config: &IngestConfig, exec: Execution) -> Result<ProcessedCorpus> {
    let name = treebank_name(path);
    let reader = BufReader::new(File::open(path)?);
    let parsed = parse_conll(reader, &name, config)?;
    Ok(process_corpus(&name, &parsed, exec))
}

/// Stream id of a treebank, derived from its name (64-bit FNV-1a) so that a
/// treebank's result does not depend on which other treebanks are analyzed.
pub fn treebank_stream(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn summarize(name: &str, metrics: &[SentenceMetrics], options: &SummaryOptions, seed: u64) -> Result<TreebankSummary> {
    let (groups, exclusions) = group_by_length(metrics);
    let source = RandomSource::new(seed).with_stream(treebank_stream(name));
    treebank_summary(name, &groups, &exclusions, metrics, options, &source)
}

/// Summarizes each `(name, metrics)` treebank in order.
pub fn analyze(treebanks: &[(String, Vec<SentenceMetrics>)], options: &SummaryOptions, seed: u64) -> Result<AnalyzeReport> {
    let summaries = treebanks
        .iter()
        .map(|(name, metrics)| summarize(name, metrics, options, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyzeReport::new(seed, options.replicas, options.scope, summaries))
}
