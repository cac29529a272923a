//! Bilingual word-pair lexicons in Hurtlex-style TSV.
//!
//! Each line is `src_word<TAB>tgt1[,tgt2,...]`; every alternative becomes
//! its own pair. Words are lowercased at load.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilingualLexicon {
    src_lang: String,
    tgt_lang: String,
    pairs: Vec<(String, String)>,
}

/// Counts of entries skipped while loading.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LexiconStats {
    pub duplicates: usize,
    /// Entries dropped because a word contains whitespace.
    pub multiword: usize,
}

impl BilingualLexicon {
    /// Builds a lexicon, dropping repeated pairs and keeping first-seen order.
    pub fn new<I, A, B>(src_lang: &str, tgt_lang: &str, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        if src_lang == tgt_lang {
            return Err(Error::Config(format!(
                "lexicon source and target language are both '{src_lang}'"
            )));
        }
        let mut lex = BilingualLexicon {
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
            pairs: Vec::new(),
        };
        let mut seen = HashSet::new();
        for (s, t) in pairs {
            let pair = (s.into(), t.into());
            if pair.0.is_empty() || pair.1.is_empty() {
                return Err(Error::Domain("lexicon words must be nonempty".into()));
            }
            if seen.insert(pair.clone()) {
                lex.pairs.push(pair);
            }
        }
        Ok(lex)
    }

    pub fn src_lang(&self) -> &str {
        &self.src_lang
    }

    pub fn tgt_lang(&self) -> &str {
        &self.tgt_lang
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Distinct source words in first-appearance order.
    pub fn source_words(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.pairs
            .iter()
            .map(|(s, _)| s.as_str())
            .filter(|s| seen.insert(*s))
            .collect()
    }

    /// Targets grouped by source word.
    pub fn grouped(&self) -> Vec<(&str, Vec<&str>)> {
        let mut order = Vec::new();
        let mut groups: HashMap<&str, Vec<&str>> = HashMap::new();
        for (s, t) in &self.pairs {
            groups
                .entry(s.as_str())
                .or_insert_with(|| {
                    order.push(s.as_str());
                    Vec::new()
                })
                .push(t.as_str());
        }
        order
            .into_iter()
            .map(|s| (s, groups.remove(s).unwrap()))
            .collect()
    }

    fn with_pairs(&self, pairs: Vec<(String, String)>) -> Self {
        BilingualLexicon {
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            pairs,
        }
    }

    pub fn read_tsv<R: BufRead>(reader: R, src: &str, tgt: &str) -> Result<(Self, LexiconStats)> {
        let mut stats = LexiconStats::default();
        let mut raw = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::io("<reader>", e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != 2 {
                return Err(Error::format(
                    line_no,
                    format!("expected 2 tab-separated cells, found {}", cells.len()),
                ));
            }
            let source = cells[0].trim().to_lowercase();
            if source.is_empty() {
                return Err(Error::format(line_no, "empty source word"));
            }
            if source.contains(char::is_whitespace) {
                stats.multiword += 1;
                continue;
            }
            let mut any = false;
            for alt in cells[1].split(',') {
                let alt = alt.trim().to_lowercase();
                if alt.is_empty() {
                    continue;
                }
                any = true;
                if alt.contains(char::is_whitespace) {
                    stats.multiword += 1;
                    continue;
                }
                raw.push((source.clone(), alt));
            }
            if !any {
                return Err(Error::format(line_no, "empty target cell"));
            }
        }
        let before = raw.len();
        let lex = BilingualLexicon::new(src, tgt, raw)?;
        stats.duplicates = before - lex.len();
        Ok((lex, stats))
    }
}

pub fn load_lexicon(path: impl AsRef<Path>, src: &str, tgt: &str) -> Result<(BilingualLexicon, LexiconStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    BilingualLexicon::read_tsv(BufReader::new(file), src, tgt)
}

/// Keeps pairs whose words are both in vocabulary. Returns the kept lexicon
/// and the number of dropped pairs.
pub fn restrict_to_vocab(
    lex: &BilingualLexicon,
    src_space: &EmbeddingSpace,
    tgt_space: &EmbeddingSpace,
) -> Result<(BilingualLexicon, usize)> {
    if src_space.language() != lex.src_lang || tgt_space.language() != lex.tgt_lang {
        return Err(Error::Config(format!(
            "lexicon {}->{} does not match spaces {}->{}",
            lex.src_lang,
            lex.tgt_lang,
            src_space.language(),
            tgt_space.language()
        )));
    }
    let kept: Vec<_> = lex
        .pairs
        .iter()
        .filter(|(s, t)| src_space.contains(s) && tgt_space.contains(t))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::InsufficientOverlap {
            src: lex.src_lang.clone(),
            tgt: lex.tgt_lang.clone(),
        });
    }
    let dropped = lex.len() - kept.len();
    Ok((lex.with_pairs(kept), dropped))
}

/// Splits by source word so that no word's translations straddle both sides.
/// The train side receives `ceil(train_fraction * distinct_sources)` words.
pub fn split_lexicon(
    lex: &BilingualLexicon,
    train_fraction: f64,
    rng_seed: u64,
) -> Result<(BilingualLexicon, BilingualLexicon)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut sources = lex.source_words();
    if sources.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "split needs at least 2 distinct source words, found {}",
            sources.len()
        )));
    }
    let n_train = (train_fraction * sources.len() as f64).ceil() as usize;
    sources.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let train_words: HashSet<&str> = sources[..n_train].iter().copied().collect();
    let (train, validation): (Vec<_>, Vec<_>) = lex
        .pairs
        .iter()
        .cloned()
        .partition(|(s, _)| train_words.contains(s.as_str()));
    Ok((lex.with_pairs(train), lex.with_pairs(validation)))
}
