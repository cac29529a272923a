//! Context similarity between words of (possibly) different languages.
//!
//! Two context words `u ∈ C(x)` and `v ∈ C(y)` are compared through their
//! rule metrics (`met_sim`) and their shared-space cosine; `word_sim` is the
//! mean of both. `context_sim` averages the two directed mean-of-max scores.
//!
//! The metric term comes in two readings:
//! * `Literal`: `1 - |Δsupp|/2 + |Δconf|/2`, which ranges over `[0.5, 1.5]`.
//! * `Bounded`: `1 - (|Δsupp| + |Δconf|)/2`, which ranges over `[0, 1]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alignment::{AlignmentModel, SpaceSet};
use crate::dataset::{Label, LabeledDataset};
use crate::embedding::cosine;
use crate::error::{Error, Result};
use crate::retrieval::SharedSpace;
use crate::rules::{build_context, mine_rules, mine_rules_for, ContextEntry, MiningConfig, WordContext};
use crate::stopwords;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimVariant {
    #[default]
    Literal,
    Bounded,
}

impl fmt::Display for SimVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimVariant::Literal => "literal",
            SimVariant::Bounded => "bounded",
        })
    }
}

impl std::str::FromStr for SimVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(SimVariant::Literal),
            "bounded" => Ok(SimVariant::Bounded),
            other => Err(Error::Config(format!("unknown similarity variant '{other}'"))),
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// Agreement of two context entries' support and confidence.
pub fn met_sim(u: ContextEntry, v: ContextEntry, variant: SimVariant) -> Result<f64> {
    for (name, x) in [
        ("support", u.support),
        ("confidence", u.confidence),
        ("support", v.support),
        ("confidence", v.confidence),
    ] {
        check_unit(name, x)?;
    }
    let d_supp = (u.support - v.support).abs();
    let d_conf = (u.confidence - v.confidence).abs();
    Ok(match variant {
        SimVariant::Literal => 1.0 - d_supp / 2.0 + d_conf / 2.0,
        SimVariant::Bounded => 1.0 - (d_supp + d_conf) / 2.0,
    })
}

/// Shared-space vectors for one language.
pub trait VectorLookup {
    fn shared_vector(&self, word: &str) -> Option<&[f64]>;
}

impl VectorLookup for SharedSpace {
    fn shared_vector(&self, word: &str) -> Option<&[f64]> {
        self.vector(word)
    }
}

impl VectorLookup for HashMap<String, Vec<f64>> {
    fn shared_vector(&self, word: &str) -> Option<&[f64]> {
        self.get(word).map(Vec::as_slice)
    }
}

impl VectorLookup for BTreeMap<String, Vec<f64>> {
    fn shared_vector(&self, word: &str) -> Option<&[f64]> {
        self.get(word).map(Vec::as_slice)
    }
}

/// Mean of cosine similarity and `met_sim`.
pub fn pair_sim(
    u_entry: ContextEntry,
    v_entry: ContextEntry,
    u_vec: &[f64],
    v_vec: &[f64],
    variant: SimVariant,
) -> Result<f64> {
    Ok((cosine(u_vec, v_vec)? + met_sim(u_entry, v_entry, variant)?) / 2.0)
}

/// `sim(u, v)` for `u ∈ C(x)` and `v ∈ C(y)`.
pub fn word_sim(
    u: &str,
    v: &str,
    context_x: &WordContext,
    context_y: &WordContext,
    vectors_x: &dyn VectorLookup,
    vectors_y: &dyn VectorLookup,
    variant: SimVariant,
) -> Result<f64> {
    let entry = |ctx: &WordContext, w: &str| {
        ctx.entries
            .get(w)
            .copied()
            .ok_or_else(|| Error::Domain(format!("'{w}' is not in the context of '{}'", ctx.word)))
    };
    let (eu, ev) = (entry(context_x, u)?, entry(context_y, v)?);
    pair_sim(eu, ev, required_vector(vectors_x, u)?, required_vector(vectors_y, v)?, variant)
}

fn required_vector<'a>(lookup: &'a dyn VectorLookup, w: &str) -> Result<&'a [f64]> {
    lookup
        .shared_vector(w)
        .ok_or_else(|| Error::NotFound(format!("no shared-space vector for '{w}'")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContextSim {
    pub score: f64,
    /// Context-word pairs left out because a word has no shared vector.
    pub skipped_pairs: usize,
}

/// Mean over `from` of the best `sim` against `to`, ignoring words without
/// vectors. `None` when no pair could be scored.
fn directed(table: &[Vec<Option<f64>>]) -> Option<f64> {
    let maxima: Vec<f64> = table
        .iter()
        .filter_map(|row| row.iter().flatten().copied().reduce(f64::max))
        .collect();
    (!maxima.is_empty()).then(|| maxima.iter().sum::<f64>() / maxima.len() as f64)
}

/// Symmetric context similarity of `x` and `y`.
pub fn context_sim(
    context_x: &WordContext,
    vectors_x: &dyn VectorLookup,
    context_y: &WordContext,
    vectors_y: &dyn VectorLookup,
    variant: SimVariant,
) -> Result<ContextSim> {
    for ctx in [context_x, context_y] {
        if ctx.is_empty() {
            return Err(Error::InsufficientData(format!("'{}' has an empty context", ctx.word)));
        }
    }
    let mut skipped_pairs = 0;
    let mut table = Vec::with_capacity(context_x.len());
    for (u, eu) in &context_x.entries {
        let mut row = Vec::with_capacity(context_y.len());
        let u_vec = vectors_x.shared_vector(u);
        for (v, ev) in &context_y.entries {
            match (u_vec, vectors_y.shared_vector(v)) {
                (Some(a), Some(b)) => row.push(Some(pair_sim(*eu, *ev, a, b, variant)?)),
                _ => {
                    skipped_pairs += 1;
                    row.push(None);
                }
            }
        }
        table.push(row);
    }
    let transposed: Vec<Vec<Option<f64>>> = (0..context_y.len())
        .map(|j| table.iter().map(|row| row[j]).collect())
        .collect();
    match (directed(&table), directed(&transposed)) {
        (Some(a), Some(b)) => Ok(ContextSim {
            score: (a + b) / 2.0,
            skipped_pairs,
        }),
        _ => Err(Error::InsufficientData(format!(
            "no context pair of '{}' and '{}' has shared vectors",
            context_x.word, context_y.word
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilarityConfig {
    pub variant: SimVariant,
    /// Terms listed per seed and target language.
    pub top_m: usize,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            variant: SimVariant::Literal,
            top_m: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredTerm {
    pub word: String,
    pub score: f64,
    pub skipped_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub seed: String,
    pub source_lang: String,
    pub target_lang: String,
    pub class: Label,
    pub variant: SimVariant,
    /// `false` marks a seed without a context in its partition.
    pub has_context: bool,
    pub terms: Vec<ScoredTerm>,
    /// Candidates dropped because none of their context pairs had vectors.
    pub skipped_candidates: usize,
}

struct Partition {
    docs: Vec<Vec<String>>,
    vectors: SharedSpace,
}

impl Partition {
    fn new(
        ds: &LabeledDataset,
        class: Label,
        mining: &MiningConfig,
        model: &AlignmentModel,
        spaces: &SpaceSet,
    ) -> Result<Self> {
        let docs = ds.partition(class);
        let docs = if mining.remove_stopwords {
            stopwords::remove(&docs, &stopwords::for_language(&ds.language))
        } else {
            docs.iter().map(|d| d.to_vec()).collect()
        };
        Ok(Partition {
            docs: docs.into_iter().filter(|d| !d.is_empty()).collect(),
            vectors: SharedSpace::build(model, spaces.get(&ds.language)?)?,
        })
    }
}

/// Ranks, for each seed and each other language, the target-language
/// frequent words by context similarity within the `class` partition.
pub fn cross_lingual_report(
    seeds: &[&str],
    seed_lang: &str,
    datasets: &[LabeledDataset],
    class: Label,
    model: &AlignmentModel,
    spaces: &SpaceSet,
    mining: &MiningConfig,
    sim: &SimilarityConfig,
) -> Result<Vec<ReportRecord>> {
    mining.validate()?;
    if seeds.is_empty() {
        return Ok(Vec::new());
    }
    let source = datasets
        .iter()
        .find(|d| d.language == seed_lang)
        .ok_or_else(|| Error::Config(format!("no dataset for seed language '{seed_lang}'")))?;
    let src = Partition::new(source, class, mining, model, spaces)?;

    let mut targets = Vec::new();
    for ds in datasets.iter().filter(|d| d.language != seed_lang) {
        let part = Partition::new(ds, class, mining, model, spaces)?;
        let contexts: Vec<WordContext> = if part.docs.is_empty() {
            Vec::new()
        } else {
            let rules = mine_rules(&part.docs, mining.top_n, mining.min_support, mining.min_confidence)?;
            let mut words: Vec<&str> = rules.iter().map(|r| r.antecedent.as_str()).collect();
            words.dedup();
            words.into_iter().map(|w| build_context(&rules, w)).collect()
        };
        targets.push((ds.language.clone(), part, contexts));
    }

    let mut records = Vec::new();
    for seed in seeds {
        let seed_context = if src.docs.is_empty() {
            None
        } else {
            let rules = mine_rules_for(&src.docs, &[seed], mining.min_support, mining.min_confidence)?;
            Some(build_context(&rules, seed)).filter(|c| !c.is_empty())
        };
        for (language, part, contexts) in &targets {
            let mut record = ReportRecord {
                seed: seed.to_string(),
                source_lang: seed_lang.to_string(),
                target_lang: language.clone(),
                class,
                variant: sim.variant,
                has_context: seed_context.is_some(),
                terms: Vec::new(),
                skipped_candidates: 0,
            };
            if let Some(seed_context) = &seed_context {
                for candidate in contexts {
                    match context_sim(seed_context, &src.vectors, candidate, &part.vectors, sim.variant) {
                        Ok(cs) => record.terms.push(ScoredTerm {
                            word: candidate.word.clone(),
                            score: cs.score,
                            skipped_pairs: cs.skipped_pairs,
                        }),
                        Err(Error::InsufficientData(_)) => record.skipped_candidates += 1,
                        Err(e) => return Err(e),
                    }
                }
                record
                    .terms
                    .sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.word.cmp(&b.word)));
                record.terms.truncate(sim.top_m);
            }
            records.push(record);
        }
    }
    Ok(records)
}
