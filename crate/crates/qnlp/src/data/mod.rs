//! Datasets of labelled sentences: loading, synthetic generation, statistics.
//!
//! Labels are 0 negative, 1 neutral, 2 positive for the 3-class task; the
//! [`binarize`] transform drops neutral records and remaps to 0 negative,
//! 1 positive for the sentence-circuit classifier.

mod generate;
pub mod llm;
pub mod vocab;

pub use generate::{generate_synthetic, Complexity, GenConfig};

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::tokenize;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DataError {
    #[error("io: {0}")]
    Io(String),
    #[error("no valid records in input")]
    AllRecordsInvalid,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("network: {0}")]
    Network(String),
    #[error("auth: {0}")]
    Auth(String),
    #[error("no parsable lines in reply")]
    NoParsableLines,
}

impl From<std::io::Error> for DataError {
    fn from(e: std::io::Error) -> Self {
        DataError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DataError>;

/// A labelled sentence with its derived token list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sentence {
    pub text: String,
    pub label: u8,
    #[serde(skip)]
    pub tokens: Vec<String>,
}

// Tokens are derived state; rebuild them when deserializing.
impl<'de> Deserialize<'de> for Sentence {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            text: String,
            label: u8,
        }
        let raw = Raw::deserialize(de)?;
        let tokens = tokenize(&raw.text);
        Ok(Sentence {
            text: raw.text,
            label: raw.label,
            tokens,
        })
    }
}

impl Sentence {
    /// Builds a sentence, tokenizing the text. `None` if no tokens survive.
    pub fn new(text: impl Into<String>, label: u8) -> Option<Self> {
        let text = text.into();
        let tokens = tokenize(&text);
        if tokens.is_empty() {
            return None;
        }
        Some(Sentence { text, label, tokens })
    }

    pub fn token_ids(&self, vocab: &Vocab) -> Vec<usize> {
        vocab.encode(&self.tokens)
    }
}

/// An immutable collection of sentences plus label-space bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub sentences: Vec<Sentence>,
    pub n_classes: u8,
    /// Present after [`binarize`]: the pre-remap label of each kept record.
    pub original_labels: Option<Vec<u8>>,
}

impl Dataset {
    pub fn new(sentences: Vec<Sentence>, n_classes: u8) -> Self {
        Dataset {
            sentences,
            n_classes,
            original_labels: None,
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Per-line problems encountered while loading.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    pub loaded: usize,
    pub skipped: Vec<(usize, String)>,
}

#[derive(Deserialize)]
struct JsonlRecord {
    text: String,
    label: u8,
}

/// Parses JSONL content: one `{"text": ..., "label": 0|1|2}` per line.
/// Malformed lines are collected with their line numbers; loading fails only
/// when nothing valid remains.
pub fn load_jsonl_str(content: &str) -> Result<(Dataset, LoadReport)> {
    let mut report = LoadReport::default();
    let mut sentences = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonlRecord>(line) {
            Ok(record) if record.label > 2 => {
                report
                    .skipped
                    .push((line_no, format!("label {} out of range", record.label)));
            }
            Ok(record) => match Sentence::new(record.text, record.label) {
                Some(sentence) => {
                    sentences.push(sentence);
                    report.loaded += 1;
                }
                None => report.skipped.push((line_no, "no tokens after tokenization".into())),
            },
            Err(e) => report.skipped.push((line_no, e.to_string())),
        }
    }
    if sentences.is_empty() {
        return Err(DataError::AllRecordsInvalid);
    }
    Ok((Dataset::new(sentences, 3), report))
}

pub fn load_jsonl(path: &Path) -> Result<(Dataset, LoadReport)> {
    load_jsonl_str(&std::fs::read_to_string(path)?)
}

pub fn save_jsonl(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    for s in &dataset.sentences {
        let line = serde_json::json!({ "text": s.text, "label": s.label });
        writeln!(file, "{line}")?;
    }
    Ok(())
}

/// Corpus-level distribution summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionStats {
    pub class_shares: Vec<f64>,
    pub mean_word_count: f64,
    pub vocab_size: usize,
}

/// Class shares, mean token count and distinct-token count.
pub fn stats(dataset: &Dataset) -> Result<DistributionStats> {
    if dataset.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let n = dataset.len() as f64;
    let mut counts = vec![0usize; usize::from(dataset.n_classes)];
    let mut token_total = 0usize;
    let mut distinct: std::collections::HashSet<&str> = std::collections::HashSet::new();
    for s in &dataset.sentences {
        counts[usize::from(s.label)] += 1;
        token_total += s.tokens.len();
        distinct.extend(s.tokens.iter().map(String::as_str));
    }
    Ok(DistributionStats {
        class_shares: counts.iter().map(|&c| c as f64 / n).collect(),
        mean_word_count: token_total as f64 / n,
        vocab_size: distinct.len(),
    })
}

/// Drops neutral records and remaps labels to 0 negative / 1 positive.
/// Original labels are retained; already-binary datasets pass through.
pub fn binarize(dataset: &Dataset) -> Dataset {
    if dataset.n_classes == 2 {
        return dataset.clone();
    }
    let mut sentences = Vec::new();
    let mut original = Vec::new();
    for s in &dataset.sentences {
        match s.label {
            0 => {
                original.push(0);
                sentences.push(s.clone());
            }
            2 => {
                original.push(2);
                let mut s = s.clone();
                s.label = 1;
                sentences.push(s);
            }
            _ => {}
        }
    }
    Dataset {
        sentences,
        n_classes: 2,
        original_labels: Some(original),
    }
}

/// Token-to-id map. Id 0 is reserved for unknown tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocab {
    ids: HashMap<String, usize>,
}

impl Vocab {
    pub const UNK: usize = 0;

    /// Number of ids, including the reserved unknown id.
    pub fn size(&self) -> usize {
        self.ids.len() + 1
    }

    pub fn id_of(&self, token: &str) -> usize {
        self.ids.get(token).copied().unwrap_or(Self::UNK)
    }

    pub fn encode(&self, tokens: &[String]) -> Vec<usize> {
        tokens.iter().map(|t| self.id_of(t)).collect()
    }
}

/// Builds a vocabulary from (the train split of) a dataset. Ids are assigned
/// by descending frequency with lexicographic tie-break, starting at 1;
/// tokens below `min_count` fall back to the unknown id.
pub fn build_vocab(dataset: &Dataset, min_count: usize) -> Result<Vocab> {
    if dataset.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for s in &dataset.sentences {
        for t in &s.tokens {
            *freq.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(&str, usize)> = freq
        .into_iter()
        .filter(|&(_, count)| count >= min_count)
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let ids = entries
        .into_iter()
        .enumerate()
        .map(|(i, (token, _))| (token.to_string(), i + 1))
        .collect();
    Ok(Vocab { ids })
}

#[cfg(test)]
mod tests;
