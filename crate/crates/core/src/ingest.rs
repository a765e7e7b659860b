//! CoNLL-X style treebank ingestion.
//!
//! Sentences are blank-line separated blocks of tab-separated rows with at
//! least eight columns (`ID FORM LEMMA CPOSTAG POSTAG FEATS HEAD DEPREL ...`).
//! Lines starting with `#` are comments. Rows whose ID is a range (`3-4`) or an
//! empty node (`3.1`) are skipped like comments.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use log::warn;
use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenClass {
    Regular,
    Punctuation,
    Null,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawToken {
    /// 1-based position within the sentence.
    pub index: usize,
    pub form: String,
    /// Fine-grained tag (POSTAG column); empty when the column holds `_`.
    pub pos_tag: String,
    /// Governor position, 0 for the root.
    pub head: usize,
    pub class: TokenClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawSentence {
    pub tokens: Vec<RawToken>,
    pub source_id: String,
}

impl RawSentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "tags")]
pub enum PunctuationRule {
    /// Every character of the form has a Unicode `P*` general category.
    UnicodeForm,
    /// The POS tag belongs to the set.
    PosTagSet(BTreeSet<String>),
    /// Either of the above.
    Combined(BTreeSet<String>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strictness {
    #[default]
    SkipMalformed,
    FailFast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestConfig {
    pub punctuation: PunctuationRule,
    /// Forms that mark null elements, matched exactly.
    pub null_forms: BTreeSet<String>,
    pub strictness: Strictness,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            punctuation: PunctuationRule::UnicodeForm,
            null_forms: BTreeSet::from(["NULL".to_string()]),
            strictness: Strictness::SkipMalformed,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        match &self.punctuation {
            PunctuationRule::PosTagSet(tags) | PunctuationRule::Combined(tags) if tags.is_empty() => {
                Err(Error::Config(
                    "the POS-tag punctuation rule needs at least one tag".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn classify(&self, form: &str, pos_tag: &str) -> TokenClass {
        let by_form = || is_punctuation_form(form);
        let punct = match &self.punctuation {
            PunctuationRule::UnicodeForm => by_form(),
            PunctuationRule::PosTagSet(tags) => tags.contains(pos_tag),
            PunctuationRule::Combined(tags) => tags.contains(pos_tag) || by_form(),
        };
        if punct {
            TokenClass::Punctuation
        } else if self.null_forms.contains(form) {
            TokenClass::Null
        } else {
            TokenClass::Regular
        }
    }
}

/// True for a non-empty string made only of Unicode punctuation characters.
pub fn is_punctuation_form(form: &str) -> bool {
    !form.is_empty() && form.chars().all(is_punctuation_char)
}

fn is_punctuation_char(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
    )
}

/// Punctuation takes precedence over null elements.
pub fn classify_token(token: &RawToken, config: &IngestConfig) -> TokenClass {
    config.classify(&token.form, &token.pos_tag)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkippedSentence {
    pub source_id: String,
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct ParsedCorpus {
    pub sentences: Vec<RawSentence>,
    pub skipped: Vec<SkippedSentence>,
}

struct Block {
    ordinal: usize,
    rows: Vec<(usize, String)>,
}

/// Parses a CoNLL stream. `source` names the stream in sentence ids, which
/// take the form `source#ordinal` with 1-based block ordinals.
pub fn parse_conll<R: BufRead>(reader: R, source: &str, config: &IngestConfig) -> Result<ParsedCorpus> {
    config.validate()?;
    let mut corpus = ParsedCorpus::default();
    let mut block = Block {
        ordinal: 1,
        rows: Vec::new(),
    };

    let flush = |block: &mut Block, corpus: &mut ParsedCorpus| -> Result<()> {
        if block.rows.is_empty() {
            return Ok(());
        }
        let source_id = format!("{source}#{}", block.ordinal);
        block.ordinal += 1;
        match parse_block(&block.rows, &source_id, config) {
            Ok(sentence) => corpus.sentences.push(sentence),
            Err((line, reason)) => match config.strictness {
                Strictness::FailFast => {
                    return Err(Error::Malformed {
                        source_id,
                        line,
                        reason,
                    })
                }
                Strictness::SkipMalformed => {
                    warn!("skipping {source_id} (line {line}): {reason}");
                    corpus.skipped.push(SkippedSentence {
                        source_id,
                        line,
                        reason,
                    });
                }
            },
        }
        block.rows.clear();
        Ok(())
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() {
            flush(&mut block, &mut corpus)?;
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        block.rows.push((lineno, trimmed.to_string()));
    }
    flush(&mut block, &mut corpus)?;
    Ok(corpus)
}

fn parse_block(
    rows: &[(usize, String)],
    source_id: &str,
    config: &IngestConfig,
) -> std::result::Result<RawSentence, (usize, String)> {
    let mut tokens = Vec::with_capacity(rows.len());
    let mut lines = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let cols: Vec<&str> = row.split('\t').collect();
        if cols.len() < 8 {
            return Err((*line, format!("expected at least 8 columns, found {}", cols.len())));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let index: usize = id
            .parse()
            .map_err(|_| (*line, format!("non-integer ID {id:?}")))?;
        if index != tokens.len() + 1 {
            return Err((*line, format!("expected ID {}, found {index}", tokens.len() + 1)));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| (*line, format!("non-integer HEAD {:?}", cols[6])))?;
        if head == index {
            return Err((*line, format!("token {index} is its own head")));
        }
        let form = cols[1].to_string();
        let pos_tag = match cols[4] {
            "_" => String::new(),
            t => t.to_string(),
        };
        let class = config.classify(&form, &pos_tag);
        tokens.push(RawToken {
            index,
            form,
            pos_tag,
            head,
            class,
        });
        lines.push(*line);
    }
    let n = tokens.len();
    if let Some((t, line)) = tokens.iter().zip(&lines).find(|(t, _)| t.head > n) {
        return Err((*line, format!("HEAD {} out of range for {n} tokens", t.head)));
    }
    Ok(RawSentence {
        tokens,
        source_id: source_id.to_string(),
    })
}

/// Writes sentences as 10-column CoNLL-X rows. Columns that are not modelled
/// are written as `_`, and DEPREL as `root` or `dep`.
pub fn write_conll<W: Write>(mut out: W, sentences: &[RawSentence]) -> std::io::Result<()> {
    for sentence in sentences {
        for t in &sentence.tokens {
            let pos = if t.pos_tag.is_empty() { "_" } else { &t.pos_tag };
            let rel = if t.head == 0 { "root" } else { "dep" };
            writeln!(
                out,
                "{}\t{}\t_\t{pos}\t{pos}\t_\t{}\t{rel}\t_\t_",
                t.index, t.form, t.head
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}
