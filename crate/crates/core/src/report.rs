//! Report formats.
//!
//! JSON carries full precision and is what `meta` consumes. TSV output is for
//! people and plotting: proportions are rounded to two significant digits,
//! p-values to the resolution of the replica count, and a p-value of zero is
//! printed as `<10^-k` (or `<1/T` when `T` is not a power of ten).

use std::cmp::Ordering;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{SentenceOutcome, ValidationReport};
use crate::metrics::SentenceMetrics;
use crate::pipeline::{MetaAnalysisResult, SentenceScope, TreebankSummary};
use crate::{Error, Result};

pub const METRICS_HEADER: &str = "source_id\tn\tD\tC\tQ";

/// Output of `analyze`, input of `meta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub seed: u64,
    pub replicas: u64,
    pub scope: SentenceScope,
    /// Universe of the p0 proportion.
    pub p0_denominator: String,
    pub treebanks: Vec<TreebankSummary>,
}

impl AnalyzeReport {
    pub fn new(seed: u64, replicas: u64, scope: SentenceScope, treebanks: Vec<TreebankSummary>) -> Self {
        AnalyzeReport {
            seed,
            replicas,
            scope,
            p0_denominator: "analyzed lengths".into(),
            treebanks,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Rounds to `digits` significant digits and prints the shortest form.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap();
    format!("{rounded}")
}

fn trim_decimal(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Formats a Monte Carlo p-value estimated from `replicas` replicas.
pub fn format_p_value(p: f64, replicas: u64) -> String {
    let decimals = (replicas.max(1) as f64).log10().ceil() as usize;
    if p == 0.0 {
        let exact_power = 10u64.checked_pow(decimals as u32) == Some(replicas);
        return if exact_power && decimals > 0 {
            format!("<10^-{decimals}")
        } else {
            format!("<1/{replicas}")
        };
    }
    trim_decimal(format!("{:.*}", decimals, p))
}

fn opt(x: Option<f64>, f: impl Fn(f64) -> String) -> String {
    x.map(f).unwrap_or_else(|| "NA".into())
}

pub fn write_summary_tsv<W: Write>(mut out: W, summaries: &[TreebankSummary]) -> std::io::Result<()> {
    writeln!(out, "treebank\tM\tp_tau_zero\tp_tau_pos\tp_value\tp0\tS\tmean_n")?;
    for s in summaries {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.name,
            s.m,
            opt(s.p_tau_zero, |p| format_sig(p, 2)),
            opt(s.p_tau_pos, |p| format_sig(p, 2)),
            opt(s.p_value, |p| format_p_value(p, s.replicas)),
            opt(s.p0, |p| format_sig(p, 2)),
            s.s,
            opt(s.mean_n, |x| format!("{x:.1}")),
        )?;
    }
    Ok(())
}

/// Treebanks sorted by decreasing p0; undefined values last.
pub fn write_p0_tsv<W: Write>(mut out: W, summaries: &[TreebankSummary]) -> std::io::Result<()> {
    let mut sorted: Vec<&TreebankSummary> = summaries.iter().collect();
    sorted.sort_by(|a, b| match (a.p0, b.p0) {
        (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(Ordering::Equal).then_with(|| a.name.cmp(&b.name)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.name.cmp(&b.name),
    });
    writeln!(out, "treebank\tp0")?;
    for s in sorted {
        writeln!(out, "{}\t{}", s.name, opt(s.p0, |p| format_sig(p, 2)))?;
    }
    Ok(())
}

pub fn write_meta_tsv<W: Write>(mut out: W, result: &MetaAnalysisResult) -> std::io::Result<()> {
    writeln!(out, "feature\tmean\tleft_p\tright_p")?;
    for f in &result.features {
        writeln!(
            out,
            "{}\t{:.1}\t{}\t{}",
            f.feature,
            f.mean,
            format_meta_p(f.left_p, result.replicas),
            format_meta_p(f.right_p, result.replicas)
        )?;
    }
    Ok(())
}

fn format_meta_p(p: f64, replicas: u64) -> String {
    if p == 0.0 {
        format_p_value(p, replicas)
    } else {
        format_sig(p, 2)
    }
}

pub fn write_metrics_tsv<W: Write>(mut out: W, metrics: &[SentenceMetrics]) -> std::io::Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for m in metrics {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", m.source_id, m.n, m.d, m.c, m.q)?;
    }
    Ok(())
}

/// Reads a metrics dump. The sum of squared degrees is recovered from the
/// tree identity `2|Q| = n(n - 1) - sum k^2`.
pub fn read_metrics_tsv<R: BufRead>(reader: R, source: &str) -> Result<Vec<SentenceMetrics>> {
    let mut metrics = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let malformed = |reason: String| Error::Malformed {
            source_id: source.to_string(),
            line: i + 1,
            reason,
        };
        if i == 0 {
            if line.trim_end() != METRICS_HEADER {
                return Err(malformed(format!("expected header {METRICS_HEADER:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(malformed(format!("expected 5 columns, found {}", cols.len())));
        }
        let num = |j: usize| -> Result<u64> {
            cols[j]
                .trim()
                .parse()
                .map_err(|_| malformed(format!("column {} is not a count: {:?}", j + 1, cols[j])))
        };
        let (n, d, c, q) = (num(1)?, num(2)?, num(3)?, num(4)?);
        let sum_k2 = (n * n.saturating_sub(1))
            .checked_sub(2 * q)
            .ok_or_else(|| malformed(format!("Q = {q} is impossible for n = {n}")))?;
        metrics.push(SentenceMetrics {
            source_id: cols[0].to_string(),
            n: n as usize,
            d,
            c,
            q,
            sum_k2,
        });
    }
    Ok(metrics)
}

/// One line per sentence: id, pruned length, prune counts and status.
pub fn write_debug_tsv<W: Write>(mut out: W, outcomes: &[SentenceOutcome]) -> std::io::Result<()> {
    writeln!(out, "source_id\tn\tremoved_punct\tremoved_null\treattached\tstatus")?;
    for o in outcomes {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            o.source_id,
            o.n,
            o.prune.removed_punct,
            o.prune.removed_null,
            o.prune.reattached,
            o.rejection.map_or("accepted", |r| r.as_str())
        )?;
    }
    Ok(())
}

pub fn write_validation_tsv<W: Write>(mut out: W, reports: &[ValidationReport]) -> std::io::Result<()> {
    use crate::tree::Rejection::*;
    writeln!(
        out,
        "treebank\tparsed\tskipped_malformed\tremoved_punct\tremoved_null\treattached\taccepted\trejected\tempty\tmulti_root\tcycle\tdisconnected"
    )?;
    for r in reports {
        let by = |reason| r.rejected.get(&reason).copied().unwrap_or(0);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.name,
            r.parsed,
            r.skipped_malformed,
            r.removed_punct,
            r.removed_null,
            r.reattached,
            r.accepted,
            r.rejected_total(),
            by(Empty),
            by(MultiRoot),
            by(Cycle),
            by(Disconnected),
        )?;
    }
    Ok(())
}
