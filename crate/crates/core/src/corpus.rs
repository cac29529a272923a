//! Tweet tokenization, seed-term corpus filtering and vocabulary counting.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub strip_urls: bool,
    pub strip_mentions: bool,
    /// `#stopX` becomes `stopx` when set; otherwise the hashtag is dropped.
    pub keep_hashtag_body: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            strip_urls: true,
            strip_mentions: true,
            keep_hashtag_body: true,
        }
    }
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Splits `text` into runs of Unicode letters and digits.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        if cfg.strip_urls && is_url(chunk) {
            continue;
        }
        if cfg.strip_mentions && chunk.starts_with('@') {
            continue;
        }
        if chunk.starts_with('#') && !cfg.keep_hashtag_body {
            continue;
        }
        for run in chunk.split(|c: char| !c.is_alphanumeric()) {
            if run.is_empty() {
                continue;
            }
            tokens.push(if cfg.lowercase {
                run.to_lowercase()
            } else {
                run.to_string()
            });
        }
    }
    tokens
}

/// Reads a seed lexicon: one term per line, `#` starts a comment line.
/// Terms pass through the tokenizer so they match tokenized corpus forms.
pub fn load_seeds(path: impl AsRef<Path>, cfg: &TokenizerConfig) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seeds = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        seeds.extend(tokenize(line, cfg));
    }
    Ok(seeds)
}

/// Keeps exactly the lines whose tokens intersect `seeds`, in input order.
pub fn filter_corpus<'a, I>(
    lines: I,
    seeds: &'a HashSet<String>,
    cfg: &'a TokenizerConfig,
) -> Result<impl Iterator<Item = I::Item> + 'a>
where
    I: IntoIterator + 'a,
    I::Item: AsRef<str>,
{
    if seeds.is_empty() {
        return Err(Error::Config("seed set is empty".into()));
    }
    Ok(lines.into_iter().filter(move |line| {
        tokenize(line.as_ref(), cfg)
            .iter()
            .any(|t| seeds.contains(t))
    }))
}

/// Word frequencies, restricted to words seen at least `min_count` times.
pub fn build_vocab<I, D, S>(corpus: I, min_count: usize) -> BTreeMap<String, usize>
where
    I: IntoIterator<Item = D>,
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    let mut counts: HashMap<String, usize> = HashMap::new();
    for doc in corpus {
        for token in doc.as_ref() {
            *counts.entry(token.as_ref().to_string()).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count.max(1))
        .collect()
}

/// Reads a one-document-per-line corpus and tokenizes it, skipping empty lines.
pub fn read_tokenized(path: impl AsRef<Path>, cfg: &TokenizerConfig) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for line in BufReader::new(file).lines() {
        let tokens = tokenize(&line.map_err(|e| Error::io(path, e))?, cfg);
        if !tokens.is_empty() {
            docs.push(tokens);
        }
    }
    Ok(docs)
}
