//! Labeled hate / non-hate tweet datasets.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, TokenizerConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    NonHate,
    Hate,
}

impl Label {
    pub fn is_hate(self) -> bool {
        self == Label::Hate
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Hate => "hate",
            Label::NonHate => "non-hate",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hate" | "1" => Ok(Label::Hate),
            "non-hate" | "nonhate" | "0" => Ok(Label::NonHate),
            other => Err(Error::Config(format!("unknown class '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub tokens: Vec<String>,
    pub label: Label,
}

/// Per-class row counts as read from the file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub hate: usize,
    pub non_hate: usize,
    /// Rows whose text produced no tokens; counted above but not kept.
    pub dropped_empty: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.hate + self.non_hate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub language: String,
    pub docs: Vec<Document>,
    pub counts: ClassCounts,
}

impl LabeledDataset {
    /// Builds a dataset from already-tokenized documents, dropping empty ones.
    pub fn new(language: &str, docs: impl IntoIterator<Item = Document>) -> Self {
        let mut counts = ClassCounts::default();
        let mut kept = Vec::new();
        for doc in docs {
            match doc.label {
                Label::Hate => counts.hate += 1,
                Label::NonHate => counts.non_hate += 1,
            }
            if doc.tokens.is_empty() {
                counts.dropped_empty += 1;
            } else {
                kept.push(doc);
            }
        }
        LabeledDataset {
            language: language.to_string(),
            docs: kept,
            counts,
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Token lists of the documents carrying `label`.
    pub fn partition(&self, label: Label) -> Vec<&[String]> {
        self.docs
            .iter()
            .filter(|d| d.label == label)
            .map(|d| d.tokens.as_slice())
            .collect()
    }

    pub fn read_tsv<R: BufRead>(reader: R, language: &str, cfg: &TokenizerConfig) -> Result<Self> {
        let mut docs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::io("<reader>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (label, text) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(line_no, "expected 'label<TAB>text'"))?;
            let label = match label.trim() {
                "1" => Label::Hate,
                "0" => Label::NonHate,
                other => return Err(Error::format(line_no, format!("unknown label '{other}'"))),
            };
            docs.push(Document {
                tokens: tokenize(text, cfg),
                label,
            });
        }
        Ok(LabeledDataset::new(language, docs))
    }

    /// Shuffled train / dev / test split with the given fractions for train
    /// and dev; the remainder is test.
    pub fn split(&self, train: f64, dev: f64, seed: u64) -> Result<(Self, Self, Self)> {
        if !(train > 0.0 && dev >= 0.0 && train + dev < 1.0) {
            return Err(Error::Config(format!(
                "split fractions train={train}, dev={dev} leave no test data"
            )));
        }
        let mut order: Vec<usize> = (0..self.docs.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n = order.len() as f64;
        let n_train = (train * n).round() as usize;
        let n_dev = (dev * n).round() as usize;
        let take = |idx: &[usize]| {
            let mut idx = idx.to_vec();
            idx.sort_unstable();
            LabeledDataset::new(&self.language, idx.into_iter().map(|i| self.docs[i].clone()))
        };
        Ok((
            take(&order[..n_train]),
            take(&order[n_train..n_train + n_dev]),
            take(&order[n_train + n_dev..]),
        ))
    }
}

pub fn load_labeled_dataset(
    path: impl AsRef<Path>,
    language: &str,
    cfg: &TokenizerConfig,
) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    LabeledDataset::read_tsv(BufReader::new(file), language, cfg)
}
