//! Skip-gram with negative sampling.
//!
//! Each input line is a sentence; context windows never cross lines. With
//! `threads == 1` training is bit-reproducible for a given seed. With more
//! threads, workers update the shared parameters without locking and the
//! result depends on scheduling.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::build_vocab;
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgnsConfig {
    pub dim: usize,
    /// Maximum context radius on each side.
    pub window: usize,
    /// Negative samples drawn per positive pair.
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly to 1e-4 of its value.
    pub learning_rate: f32,
    pub min_count: usize,
    /// Frequency subsampling threshold; 0 disables subsampling.
    pub subsample_t: f64,
    pub rng_seed: u64,
    pub threads: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 5,
            subsample_t: 1e-4,
            rng_seed: 1,
            threads: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, rule: &str| Err(Error::Config(format!("sgns.{field} {rule}")));
        if self.dim < 2 {
            return fail("dim", "must be >= 2");
        }
        if self.window < 1 {
            return fail("window", "must be >= 1");
        }
        if self.negatives < 1 {
            return fail("negatives", "must be >= 1");
        }
        if self.epochs < 1 {
            return fail("epochs", "must be >= 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail("learning_rate", "must be positive");
        }
        if self.min_count < 1 {
            return fail("min_count", "must be >= 1");
        }
        if !(self.subsample_t >= 0.0) {
            return fail("subsample_t", "must be >= 0");
        }
        if self.threads < 1 {
            return fail("threads", "must be >= 1");
        }
        Ok(())
    }
}

/// `f32` cell shared between workers; lost updates are tolerated.
#[derive(Default)]
#[repr(transparent)]
struct Real(AtomicU32);

impl Real {
    fn new(v: f32) -> Self {
        Real(AtomicU32::new(v.to_bits()))
    }

    #[inline]
    fn get(&self) -> f32 {
        f32::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    fn add(&self, x: f32) {
        self.0.store((self.get() + x).to_bits(), Ordering::Relaxed);
    }
}

/// Vocabulary ordered by descending count, ties by word.
struct Vocab {
    words: Vec<String>,
    counts: Vec<u64>,
}

impl Vocab {
    fn new<D: AsRef<[S]>, S: AsRef<str>>(corpus: &[D], min_count: usize) -> Self {
        let mut entries: Vec<(String, usize)> = build_vocab(corpus, min_count).into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Vocab {
            counts: entries.iter().map(|(_, c)| *c as u64).collect(),
            words: entries.into_iter().map(|(w, _)| w).collect(),
        }
    }
}

/// Cumulative unigram^(3/4) distribution for negative draws.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|c| {
                acc += (*c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|c| *c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// Probability of keeping each word under frequency subsampling.
fn keep_probabilities(counts: &[u64], t: f64) -> Vec<f64> {
    if t <= 0.0 {
        return vec![1.0; counts.len()];
    }
    let total: u64 = counts.iter().sum();
    let threshold = t * total as f64;
    counts
        .iter()
        .map(|c| {
            let c = *c as f64;
            (((c / threshold).sqrt() + 1.0) * threshold / c).min(1.0)
        })
        .collect()
}

/// Applies subsampling to one encoded sentence. With `t == 0` every token is kept.
fn subsample<R: Rng>(sentence: &[u32], keep: &[f64], rng: &mut R, out: &mut Vec<u32>) {
    out.clear();
    for &w in sentence {
        let p = keep[w as usize];
        if p >= 1.0 || rng.random::<f64>() < p {
            out.push(w);
        }
    }
}

struct Trainer<'a> {
    cfg: &'a SgnsConfig,
    input: Vec<Real>,
    output: Vec<Real>,
    noise: NoiseTable,
    keep: Vec<f64>,
    processed: AtomicU64,
    total_work: u64,
}

impl Trainer<'_> {
    fn learning_rate(&self) -> f32 {
        let progress = self.processed.load(Ordering::Relaxed) as f64 / (self.total_work as f64 + 1.0);
        let lr0 = f64::from(self.cfg.learning_rate);
        (lr0 * (1.0 - progress)).max(lr0 * 1e-4) as f32
    }

    fn train_pair(&self, center: usize, context: usize, lr: f32, rng: &mut ChaCha8Rng, grad: &mut [f32]) {
        let dim = self.cfg.dim;
        let inp = &self.input[center * dim..(center + 1) * dim];
        grad.iter_mut().for_each(|g| *g = 0.0);
        for d in 0..=self.cfg.negatives {
            let (target, label) = if d == 0 {
                (context, 1.0f32)
            } else {
                let t = self.noise.sample(rng);
                if t == context {
                    continue;
                }
                (t, 0.0)
            };
            let out = &self.output[target * dim..(target + 1) * dim];
            let f: f32 = inp.iter().zip(out).map(|(a, b)| a.get() * b.get()).sum();
            let g = (label - sigmoid(f)) * lr;
            for ((gi, o), i) in grad.iter_mut().zip(out).zip(inp) {
                *gi += g * o.get();
                o.add(g * i.get());
            }
        }
        for (i, g) in inp.iter().zip(grad.iter()) {
            i.add(*g);
        }
    }

    fn run_worker(&self, sentences: &[Vec<u32>], worker: usize, workers: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(
            self.cfg.rng_seed ^ (worker as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut grad = vec![0.0f32; self.cfg.dim];
        let mut kept = Vec::new();
        for _ in 0..self.cfg.epochs {
            for sentence in sentences.iter().skip(worker).step_by(workers) {
                subsample(sentence, &self.keep, &mut rng, &mut kept);
                let lr = self.learning_rate();
                for pos in 0..kept.len() {
                    let reduced = rng.random_range(0..self.cfg.window);
                    let radius = self.cfg.window - reduced;
                    let lo = pos.saturating_sub(radius);
                    let hi = (pos + radius).min(kept.len() - 1);
                    for c in lo..=hi {
                        if c != pos {
                            self.train_pair(kept[pos] as usize, kept[c] as usize, lr, &mut rng, &mut grad);
                        }
                    }
                }
                self.processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
            }
        }
    }
}

#[inline]
fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

/// Trains SGNS vectors over the words surviving `min_count`.
pub fn train_sgns<D, S>(corpus: &[D], language: &str, cfg: &SgnsConfig) -> Result<EmbeddingSpace>
where
    D: AsRef<[S]> + Sync,
    S: AsRef<str>,
{
    cfg.validate()?;
    let vocab = Vocab::new(corpus, cfg.min_count);
    if vocab.words.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "vocabulary has {} word(s) after min_count={}; need at least 2",
            vocab.words.len(),
            cfg.min_count
        )));
    }
    let index: HashMap<&str, u32> = vocab
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i as u32))
        .collect();
    let sentences: Vec<Vec<u32>> = corpus
        .iter()
        .map(|doc| {
            doc.as_ref()
                .iter()
                .filter_map(|t| index.get(t.as_ref()).copied())
                .collect::<Vec<u32>>()
        })
        .filter(|s| !s.is_empty())
        .collect();
    let tokens: u64 = sentences.iter().map(|s| s.len() as u64).sum();

    let dim = cfg.dim;
    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let input: Vec<Real> = (0..vocab.words.len() * dim)
        .map(|_| Real::new((init_rng.random::<f32>() - 0.5) / dim as f32))
        .collect();
    let output: Vec<Real> = (0..vocab.words.len() * dim).map(|_| Real::default()).collect();

    let trainer = Trainer {
        cfg,
        input,
        output,
        noise: NoiseTable::new(&vocab.counts),
        keep: keep_probabilities(&vocab.counts, cfg.subsample_t),
        processed: AtomicU64::new(0),
        total_work: tokens * cfg.epochs as u64,
    };

    if cfg.threads == 1 {
        trainer.run_worker(&sentences, 0, 1);
    } else {
        std::thread::scope(|scope| {
            for worker in 0..cfg.threads {
                let trainer = &trainer;
                let sentences = &sentences;
                scope.spawn(move || trainer.run_worker(sentences, worker, cfg.threads));
            }
        });
    }

    let rows = vocab.words.iter().enumerate().map(|(i, word)| {
        let row: Vec<f32> = trainer.input[i * dim..(i + 1) * dim]
            .iter()
            .map(Real::get)
            .collect();
        (word.clone(), row)
    });
    EmbeddingSpace::from_rows(language, dim, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_threshold_subsampling_is_identity() {
        let keep = keep_probabilities(&[1000, 10, 1], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sentence = vec![0, 1, 2, 0, 0, 1];
        let mut out = Vec::new();
        subsample(&sentence, &keep, &mut rng, &mut out);
        assert_eq!(out, sentence);
    }

    #[test]
    fn frequent_words_are_subsampled_more() {
        let keep = keep_probabilities(&[100_000, 10], 1e-3);
        assert!(keep[0] < keep[1]);
        assert_eq!(keep[1], 1.0);
    }

    #[test]
    fn noise_follows_three_quarter_power() {
        let table = NoiseTable::new(&[16, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let hits = (0..n).filter(|_| table.sample(&mut rng) == 0).count();
        // 16^0.75 = 8, so P(word 0) = 8/9.
        let p = hits as f64 / n as f64;
        assert!((p - 8.0 / 9.0).abs() < 0.005, "p = {p}");
    }

    #[test]
    fn single_word_vocab_is_insufficient() {
        let corpus = vec![vec!["a", "a", "a"], vec!["a", "b"]];
        let cfg = SgnsConfig {
            min_count: 2,
            dim: 4,
            ..SgnsConfig::default()
        };
        assert!(matches!(
            train_sgns(&corpus, "en", &cfg),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn config_validation_names_field() {
        let cfg = SgnsConfig {
            negatives: 0,
            ..SgnsConfig::default()
        };
        match cfg.validate() {
            Err(Error::Config(msg)) => assert!(msg.contains("negatives")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn output_vocab_matches_build_vocab() {
        let corpus = vec![vec!["a", "b", "c", "a"], vec!["b", "d", "a"]];
        let cfg = SgnsConfig {
            dim: 4,
            min_count: 2,
            epochs: 2,
            ..SgnsConfig::default()
        };
        let space = train_sgns(&corpus, "en", &cfg).unwrap();
        let mut words: Vec<_> = space.words().to_vec();
        words.sort();
        let expected: Vec<String> = build_vocab(&corpus, 2).into_keys().collect();
        assert_eq!(words, expected);
    }
}
