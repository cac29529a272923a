//! Seeded synthetic fixtures: multilingual spaces related by orthogonal
//! maps, labeled documents with a planted linear rule, and small corpora
//! with planted co-occurrence structure.

use nalgebra::DMatrix;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::alignment::SpaceSet;
use crate::dataset::{Document, Label, LabeledDataset};
use crate::embedding::EmbeddingSpace;
use crate::error::Result;
use crate::lexicon::BilingualLexicon;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rows: usize, cols: usize, sigma: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    DMatrix::from_fn(rows, cols, |_, _| normal.sample(rng))
}

/// Haar-distributed random orthogonal matrix.
pub fn random_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let qr = gaussian(d, d, 1.0, &mut r).qr();
    let (mut q, upper) = (qr.q(), qr.r());
    for j in 0..d {
        if upper[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random matrix with condition number bounded away from singular.
pub fn random_invertible(d: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let u = random_orthogonal(d, r.random());
    let v = random_orthogonal(d, r.random());
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| r.random_range(0.3..3.0)));
    u * s * v.transpose()
}

/// Word name of proto index `i` in `language`.
pub fn word_name(language: &str, i: usize) -> String {
    format!("{language}w{i:04}")
}

#[derive(Debug, Clone)]
pub struct MultilingualSpec {
    pub languages: Vec<String>,
    pub words: usize,
    pub dim: usize,
    pub noise: f64,
    pub align_pairs: usize,
    pub validation_pairs: usize,
    pub seed: u64,
}

impl Default for MultilingualSpec {
    fn default() -> Self {
        MultilingualSpec {
            languages: vec!["en".into(), "es".into(), "it".into()],
            words: 500,
            dim: 50,
            noise: 0.01,
            align_pairs: 150,
            validation_pairs: 100,
            seed: 2020,
        }
    }
}

/// Spaces `proto · Q_lang + noise` sharing word indices across languages.
#[derive(Debug, Clone)]
pub struct MultilingualFixture {
    pub spec: MultilingualSpec,
    /// `words × dim`, one latent vector per concept.
    pub proto: DMatrix<f64>,
    pub spaces: SpaceSet,
    pub align_indices: Vec<usize>,
    pub validation_indices: Vec<usize>,
}

impl MultilingualFixture {
    pub fn generate(spec: MultilingualSpec) -> Result<Self> {
        let mut r = rng(spec.seed);
        let proto = gaussian(spec.words, spec.dim, 1.0 / (spec.dim as f64).sqrt(), &mut r);
        let mut spaces = SpaceSet::new();
        for language in &spec.languages {
            let q = random_orthogonal(spec.dim, r.random());
            let noisy = &proto * q + gaussian(spec.words, spec.dim, spec.noise, &mut r);
            let rows = (0..spec.words).map(|i| {
                (
                    word_name(language, i),
                    noisy.row(i).iter().map(|v| *v as f32).collect::<Vec<f32>>(),
                )
            });
            spaces.insert(EmbeddingSpace::from_rows(language, spec.dim, rows)?);
        }
        let mut order: Vec<usize> = (0..spec.words).collect();
        order.shuffle(&mut r);
        let align_indices = order[..spec.align_pairs].to_vec();
        let validation_indices =
            order[spec.align_pairs..spec.align_pairs + spec.validation_pairs].to_vec();
        Ok(MultilingualFixture {
            spec,
            proto,
            spaces,
            align_indices,
            validation_indices,
        })
    }

    fn lexicon(&self, src: &str, tgt: &str, indices: &[usize]) -> BilingualLexicon {
        BilingualLexicon::new(
            src,
            tgt,
            indices.iter().map(|&i| (word_name(src, i), word_name(tgt, i))),
        )
        .expect("distinct languages")
    }

    pub fn pivot(&self) -> &str {
        &self.spec.languages[0]
    }

    /// Alignment lexicons pivot → every other language.
    pub fn alignment_lexicons(&self) -> Vec<BilingualLexicon> {
        self.spec.languages[1..]
            .iter()
            .map(|l| self.lexicon(self.pivot(), l, &self.align_indices))
            .collect()
    }

    /// Held-out pairs `src → tgt` over the validation indices.
    pub fn validation_lexicon(&self, src: &str, tgt: &str) -> BilingualLexicon {
        self.lexicon(src, tgt, &self.validation_indices)
    }
}

/// Labeled documents whose label is a linear rule on the mean latent vector.
#[derive(Debug, Clone)]
pub struct PlantedRule {
    pub direction: Vec<f64>,
    pub threshold: f64,
}

impl PlantedRule {
    /// Random direction; threshold set so that about `positive_rate` of
    /// random documents of `doc_len` words are positive.
    pub fn generate(fixture: &MultilingualFixture, doc_len: usize, positive_rate: f64, seed: u64) -> Self {
        let mut r = rng(seed);
        let d = fixture.spec.dim;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut direction: Vec<f64> = (0..d).map(|_| normal.sample(&mut r)).collect();
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        direction.iter_mut().for_each(|v| *v /= norm);
        let mut rule = PlantedRule {
            direction,
            threshold: 0.0,
        };
        let mut scores: Vec<f64> = (0..4000)
            .map(|_| {
                let idx: Vec<usize> = (0..doc_len).map(|_| r.random_range(0..fixture.spec.words)).collect();
                rule.score(fixture, &idx)
            })
            .collect();
        scores.sort_by(f64::total_cmp);
        rule.threshold = scores[((1.0 - positive_rate) * scores.len() as f64) as usize];
        rule
    }

    pub fn score(&self, fixture: &MultilingualFixture, indices: &[usize]) -> f64 {
        let d = fixture.spec.dim;
        let mut mean = vec![0.0; d];
        for &i in indices {
            for (m, v) in mean.iter_mut().zip(fixture.proto.row(i).iter()) {
                *m += v / indices.len() as f64;
            }
        }
        mean.iter().zip(&self.direction).map(|(a, b)| a * b).sum()
    }

    /// `n_docs` documents of `doc_len` words in `language`.
    pub fn dataset(
        &self,
        fixture: &MultilingualFixture,
        language: &str,
        n_docs: usize,
        doc_len: usize,
        seed: u64,
    ) -> LabeledDataset {
        let mut r = rng(seed);
        let docs: Vec<Document> = (0..n_docs)
            .map(|_| {
                let idx: Vec<usize> = (0..doc_len).map(|_| r.random_range(0..fixture.spec.words)).collect();
                let label = if self.score(fixture, &idx) >= self.threshold {
                    Label::Hate
                } else {
                    Label::NonHate
                };
                Document {
                    tokens: idx.iter().map(|&i| word_name(language, i)).collect(),
                    label,
                }
            })
            .collect();
        LabeledDataset::new(language, docs)
    }
}

/// Corpus where word pairs `p{i}`/`q{i}` share private context words
/// `c{i}x*`, while `z{i}` words only appear with shared fillers.
pub fn paired_token_corpus(pairs: usize, lines_per_pair: usize, seed: u64) -> Vec<Vec<String>> {
    let mut r = rng(seed);
    let fillers: Vec<String> = (0..30).map(|i| format!("f{i}")).collect();
    let mut lines = Vec::new();
    for i in 0..pairs {
        for _ in 0..lines_per_pair {
            let mut line = vec![format!("p{i}"), format!("q{i}")];
            line.extend((0..3).map(|_| format!("c{i}x{}", r.random_range(0..4))));
            line.push(fillers.choose(&mut r).unwrap().clone());
            line.shuffle(&mut r);
            lines.push(line);

            let mut noise = vec![format!("z{i}")];
            noise.extend((0..5).map(|_| fillers.choose(&mut r).unwrap().clone()));
            noise.shuffle(&mut r);
            lines.push(noise);
        }
    }
    lines.shuffle(&mut r);
    lines
}

/// Topic-structured tweets for `language`: each line draws most words from
/// one topic. The topic structure depends only on `structure_seed`, so
/// corpora of different languages are translations of one another up to
/// word naming and sampling noise.
pub fn topic_corpus(
    language: &str,
    topics: usize,
    words_per_topic: usize,
    lines: usize,
    structure_seed: u64,
    sample_seed: u64,
) -> Vec<String> {
    topic_lines(language, topics, words_per_topic, lines, structure_seed, sample_seed)
        .into_iter()
        .map(|(_, line)| line)
        .collect()
}

/// Like [`topic_corpus`] but keeps the topic of every line.
pub fn topic_lines(
    language: &str,
    topics: usize,
    words_per_topic: usize,
    lines: usize,
    structure_seed: u64,
    sample_seed: u64,
) -> Vec<(usize, String)> {
    let mut structure = rng(structure_seed);
    let vocab = topics * words_per_topic;
    let mut order: Vec<usize> = (0..vocab).collect();
    order.shuffle(&mut structure);
    let mut r = rng(sample_seed);
    (0..lines)
        .map(|_| {
            let t = r.random_range(0..topics);
            let len = r.random_range(6..12);
            let line = (0..len)
                .map(|_| {
                    let idx = if r.random::<f64>() < 0.85 {
                        order[t * words_per_topic + r.random_range(0..words_per_topic)]
                    } else {
                        order[r.random_range(0..vocab)]
                    };
                    word_name(language, idx)
                })
                .collect::<Vec<_>>()
                .join(" ");
            (t, line)
        })
        .collect()
}
