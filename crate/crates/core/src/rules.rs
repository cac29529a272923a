//! Single-consequent association rules `{x} => {u}` over documents.
//!
//! Presence is counted per document, so a word repeated inside one
//! document contributes once. `support` is the fraction of documents
//! containing both words and `confidence` divides it by the fraction
//! containing `x`.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiningConfig {
    pub top_n: usize,
    pub min_support: f64,
    pub min_confidence: f64,
    /// Remove the bundled stopwords of the dataset's language before mining.
    pub remove_stopwords: bool,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            top_n: 100,
            min_support: 0.01,
            min_confidence: 0.1,
            remove_stopwords: true,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        check_threshold("min_support", self.min_support)?;
        check_threshold("min_confidence", self.min_confidence)?;
        if self.top_n == 0 {
            return Err(Error::Config("mining.top_n must be >= 1".into()));
        }
        Ok(())
    }
}

fn check_threshold(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("mining.{name} must lie in (0, 1], got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationRule {
    pub antecedent: String,
    pub consequent: String,
    pub support: f64,
    pub confidence: f64,
}

/// Support and confidence of a context word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContextEntry {
    pub support: f64,
    pub confidence: f64,
}

/// `C(x)`: consequents of every surviving rule with antecedent `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordContext {
    pub word: String,
    pub entries: BTreeMap<String, ContextEntry>,
}

impl WordContext {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Document sets with dense word ids.
struct Transactions<'a> {
    words: Vec<&'a str>,
    docs: Vec<Vec<u32>>,
    doc_freq: Vec<usize>,
}

impl<'a> Transactions<'a> {
    fn new<D: AsRef<[S]>, S: AsRef<str> + 'a>(docs: &'a [D]) -> Self {
        let mut ids: HashMap<&'a str, u32> = HashMap::new();
        let mut words = Vec::new();
        let mut sets = Vec::with_capacity(docs.len());
        for doc in docs {
            let mut set: Vec<u32> = doc
                .as_ref()
                .iter()
                .map(|t| {
                    let t = t.as_ref();
                    *ids.entry(t).or_insert_with(|| {
                        words.push(t);
                        (words.len() - 1) as u32
                    })
                })
                .collect();
            set.sort_unstable();
            set.dedup();
            sets.push(set);
        }
        let mut doc_freq = vec![0usize; words.len()];
        for set in &sets {
            for &w in set {
                doc_freq[w as usize] += 1;
            }
        }
        Transactions {
            words,
            docs: sets,
            doc_freq,
        }
    }

    fn rules_for(&self, x: usize, min_support: f64, min_confidence: f64) -> Vec<AssociationRule> {
        let n = self.docs.len() as f64;
        let df_x = self.doc_freq[x];
        let mut co: HashMap<u32, usize> = HashMap::new();
        for set in self.docs.iter().filter(|s| s.binary_search(&(x as u32)).is_ok()) {
            for &u in set {
                if u as usize != x {
                    *co.entry(u).or_default() += 1;
                }
            }
        }
        co.into_iter()
            .filter_map(|(u, c)| {
                let support = c as f64 / n;
                let confidence = c as f64 / df_x as f64;
                (support >= min_support && confidence >= min_confidence).then(|| AssociationRule {
                    antecedent: self.words[x].to_string(),
                    consequent: self.words[u as usize].to_string(),
                    support,
                    confidence,
                })
            })
            .collect()
    }
}

fn sort_rules(rules: &mut [AssociationRule]) {
    rules.sort_by(|a, b| {
        a.antecedent
            .cmp(&b.antecedent)
            .then_with(|| b.confidence.total_cmp(&a.confidence))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
}

/// The `n` words with the highest document frequency, ties broken by word.
pub fn top_antecedents<D: AsRef<[S]>, S: AsRef<str>>(docs: &[D], n: usize) -> Vec<String> {
    let tx = Transactions::new(docs);
    let mut ids: Vec<usize> = (0..tx.words.len()).collect();
    ids.sort_by(|a, b| {
        tx.doc_freq[*b]
            .cmp(&tx.doc_freq[*a])
            .then_with(|| tx.words[*a].cmp(tx.words[*b]))
    });
    ids.into_iter().take(n).map(|i| tx.words[i].to_string()).collect()
}

fn validate_docs<D>(docs: &[D], min_support: f64, min_confidence: f64) -> Result<()> {
    if docs.is_empty() {
        return Err(Error::InsufficientData("no documents to mine".into()));
    }
    check_threshold("min_support", min_support)?;
    check_threshold("min_confidence", min_confidence)
}

/// Mines rules for the `top_n` most document-frequent words.
pub fn mine_rules<D: AsRef<[S]>, S: AsRef<str>>(
    docs: &[D],
    top_n: usize,
    min_support: f64,
    min_confidence: f64,
) -> Result<Vec<AssociationRule>> {
    validate_docs(docs, min_support, min_confidence)?;
    let antecedents = top_antecedents(docs, top_n);
    let refs: Vec<&str> = antecedents.iter().map(String::as_str).collect();
    mine_rules_for(docs, &refs, min_support, min_confidence)
}

/// Mines rules for an explicit antecedent list. Words absent from every
/// document yield no rules.
pub fn mine_rules_for<D: AsRef<[S]>, S: AsRef<str>>(
    docs: &[D],
    antecedents: &[&str],
    min_support: f64,
    min_confidence: f64,
) -> Result<Vec<AssociationRule>> {
    validate_docs(docs, min_support, min_confidence)?;
    let tx = Transactions::new(docs);
    let index: HashMap<&str, usize> = tx.words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let mut seen = HashSet::new();
    let mut rules = Vec::new();
    for x in antecedents {
        if !seen.insert(*x) {
            continue;
        }
        if let Some(&id) = index.get(x) {
            rules.extend(tx.rules_for(id, min_support, min_confidence));
        }
    }
    sort_rules(&mut rules);
    Ok(rules)
}

/// Collects the consequents of `x`'s rules.
pub fn build_context(rules: &[AssociationRule], x: &str) -> WordContext {
    let entries: BTreeMap<String, ContextEntry> = rules
        .iter()
        .filter(|r| r.antecedent == x)
        .map(|r| {
            (
                r.consequent.clone(),
                ContextEntry {
                    support: r.support,
                    confidence: r.confidence,
                },
            )
        })
        .collect();
    if entries.is_empty() {
        log::warn!("'{x}' has no surviving rules; its context is empty");
    }
    WordContext {
        word: x.to_string(),
        entries,
    }
}

/// Convenience: context of one word mined directly from `docs`.
pub fn context_of<D: AsRef<[S]>, S: AsRef<str>>(
    docs: &[D],
    x: &str,
    min_support: f64,
    min_confidence: f64,
) -> Result<WordContext> {
    let rules = mine_rules_for(docs, &[x], min_support, min_confidence)?;
    Ok(build_context(&rules, x))
}
