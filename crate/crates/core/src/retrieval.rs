//! Exact cross-lingual nearest neighbors and BLI precision@k.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::alignment::{AlignmentModel, SpaceSet};
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::BilingualLexicon;

/// One language's vocabulary mapped into the shared space.
#[derive(Debug, Clone)]
pub struct SharedSpace {
    language: String,
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
    unit: Vec<f64>,
}

impl SharedSpace {
    pub fn build(model: &AlignmentModel, space: &EmbeddingSpace) -> Result<Self> {
        let dim = model.shared_dim();
        let mut vectors = Vec::with_capacity(space.len() * dim);
        for (_, row) in space.rows() {
            vectors.extend(model.map_vector(space.language(), row)?);
        }
        let mut unit = vectors.clone();
        for row in unit.chunks_exact_mut(dim) {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
        Ok(SharedSpace {
            language: space.language().to_string(),
            dim,
            words: space.words().to_vec(),
            index: space
                .words()
                .iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect(),
            vectors,
            unit,
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Shared-space vector of `word`.
    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    fn unit_row(&self, i: usize) -> &[f64] {
        &self.unit[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub word: String,
    pub language: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborList {
    pub query: String,
    pub query_lang: String,
    pub target_lang: String,
    pub neighbors: Vec<Neighbor>,
    /// Set when fewer than `k` candidates exist.
    pub truncated: bool,
}

fn by_score_then_word<'a>(words: &'a [String]) -> impl Fn(&(usize, f64), &(usize, f64)) -> Ordering + 'a {
    move |a, b| b.1.total_cmp(&a.1).then_with(|| words[a.0].cmp(&words[b.0]))
}

/// Top-`k` cosine neighbors of a shared-space vector. `exclude` removes one
/// word (used when query and target language coincide).
pub fn knn_vector(
    query: &[f64],
    target: &SharedSpace,
    k: usize,
    exclude: Option<&str>,
) -> Result<(Vec<Neighbor>, bool)> {
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    if query.len() != target.dim {
        return Err(Error::Dimension {
            expected: target.dim,
            actual: query.len(),
        });
    }
    let qnorm = query.iter().map(|v| v * v).sum::<f64>().sqrt();
    if qnorm == 0.0 {
        return Err(Error::UndefinedSimilarity);
    }
    let skip = exclude.and_then(|w| target.index.get(w).copied());
    let mut scored: Vec<(usize, f64)> = (0..target.len())
        .filter(|i| Some(*i) != skip)
        .map(|i| {
            let dot: f64 = target.unit_row(i).iter().zip(query).map(|(a, b)| a * b).sum();
            (i, (dot / qnorm).clamp(-1.0, 1.0))
        })
        .collect();
    let truncated = k > scored.len();
    let cmp = by_score_then_word(&target.words);
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, &cmp);
        scored.truncate(k);
    }
    scored.sort_by(&cmp);
    let neighbors = scored
        .into_iter()
        .map(|(i, score)| Neighbor {
            word: target.words[i].clone(),
            language: target.language.clone(),
            score,
        })
        .collect();
    Ok((neighbors, truncated))
}

/// Exact top-`k` neighbors of `query_word` among `target`'s vocabulary.
pub fn knn_in(
    model: &AlignmentModel,
    spaces: &SpaceSet,
    query_word: &str,
    query_lang: &str,
    target: &SharedSpace,
    k: usize,
) -> Result<NeighborList> {
    let query = model.project(query_word, query_lang, spaces)?;
    let exclude = (query_lang == target.language).then_some(query_word);
    let (neighbors, truncated) = knn_vector(&query, target, k, exclude)?;
    Ok(NeighborList {
        query: query_word.to_string(),
        query_lang: query_lang.to_string(),
        target_lang: target.language.clone(),
        neighbors,
        truncated,
    })
}

pub fn knn(
    model: &AlignmentModel,
    spaces: &SpaceSet,
    query_word: &str,
    query_lang: &str,
    target_lang: &str,
    k: usize,
) -> Result<NeighborList> {
    if !model.has_language(target_lang) {
        return Err(Error::Config(format!(
            "language '{target_lang}' is not in the alignment model"
        )));
    }
    let target = SharedSpace::build(model, spaces.get(target_lang)?)?;
    knn_in(model, spaces, query_word, query_lang, &target, k)
}

#[derive(Debug, Clone, Serialize)]
pub struct BliRecord {
    pub query: String,
    pub gold: Vec<String>,
    pub neighbors: Vec<Neighbor>,
    pub hit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BliReport {
    pub src_lang: String,
    pub tgt_lang: String,
    pub k: usize,
    pub precision: f64,
    /// Source words scored.
    pub evaluated: usize,
    /// Source words left out because the query or all its targets are OOV.
    pub excluded: usize,
    #[serde(skip)]
    pub records: Vec<BliRecord>,
}

/// Fraction of validation source words with any gold target among their
/// top-`k` target-language neighbors.
pub fn bli_precision_at_k(
    model: &AlignmentModel,
    spaces: &SpaceSet,
    validation: &BilingualLexicon,
    k: usize,
) -> Result<BliReport> {
    let (src, tgt) = (validation.src_lang(), validation.tgt_lang());
    let src_space = spaces.get(src)?;
    let target = SharedSpace::build(model, spaces.get(tgt)?)?;
    let mut records = Vec::new();
    let mut excluded = 0;
    for (query, golds) in validation.grouped() {
        let gold: Vec<String> = golds
            .into_iter()
            .filter(|g| target.contains(g))
            .map(str::to_string)
            .collect();
        if gold.is_empty() || !src_space.contains(query) {
            excluded += 1;
            continue;
        }
        let list = knn_in(model, spaces, query, src, &target, k)?;
        let hit = list.neighbors.iter().any(|n| gold.contains(&n.word));
        records.push(BliRecord {
            query: query.to_string(),
            gold,
            neighbors: list.neighbors,
            hit,
        });
    }
    if records.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no validation pair {src}->{tgt} is in vocabulary"
        )));
    }
    let hits = records.iter().filter(|r| r.hit).count();
    Ok(BliReport {
        src_lang: src.to_string(),
        tgt_lang: tgt.to_string(),
        k,
        precision: hits as f64 / records.len() as f64,
        evaluated: records.len(),
        excluded,
        records,
    })
}
