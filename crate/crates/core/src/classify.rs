//! Zero-shot cross-lingual classification over mean-pooled shared-space
//! document vectors, with an L2-regularized logistic regression.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alignment::{AlignmentModel, SpaceSet};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::retrieval::SharedSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Probability at or above which a document is labeled hate.
    pub threshold: f64,
    pub split_seed: u64,
    pub init_seed: u64,
    /// Half-width of uniform initial weights; 0 starts from zeros.
    pub init_jitter: f64,
    pub train_fraction: f64,
    pub dev_fraction: f64,
    /// Descend in z-scored feature coordinates (training-set mean and
    /// standard deviation), then fold the scaling back into the weights.
    /// The L2 penalty then acts on the z-scored weights.
    pub standardize: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            epochs: 500,
            learning_rate: 0.5,
            l2: 0.0,
            threshold: 0.5,
            split_seed: 13,
            init_seed: 0,
            init_jitter: 0.0,
            train_fraction: 0.7,
            dev_fraction: 0.1,
            standardize: true,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("classify.epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("classify.learning_rate must be positive".into()));
        }
        if !(self.l2 >= 0.0) {
            return Err(Error::Config("classify.l2 must be >= 0".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config("classify.threshold must lie in (0, 1)".into()));
        }
        if !(self.init_jitter >= 0.0) {
            return Err(Error::Config("classify.init_jitter must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub language: String,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl ClassifierModel {
    pub fn probability(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::Dimension {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        Ok(sigmoid(dot(&self.weights, x) + self.bias))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Metrics {
    /// Rates for the hate class; empty denominators give 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |a: usize, b: usize| if b > 0 { a as f64 / b as f64 } else { 0.0 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics {
            precision,
            recall,
            f1,
            accuracy: ratio(tp + tn, tp + fp + fn_ + tn),
            tp,
            fp,
            fn_,
            tn,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub const TSV_HEADER: &'static str = "train\ttest\tprecision\trecall\tf1\taccuracy\ttp\tfp\tfn\ttn";

    pub fn tsv_row(&self, train: &str, test: &str) -> String {
        format!(
            "{train}\t{test}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}",
            self.precision, self.recall, self.f1, self.accuracy, self.tp, self.fp, self.fn_, self.tn
        )
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Document vector: mean of the in-vocabulary tokens' shared vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DocFeatures {
    pub vector: Vec<f64>,
    /// Set when no token was in vocabulary; `vector` is then all zeros.
    pub all_oov: bool,
}

fn mean_pool<'a>(dim: usize, vectors: impl Iterator<Item = &'a [f64]>) -> DocFeatures {
    let mut sum = vec![0.0; dim];
    let mut n = 0usize;
    for v in vectors {
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        n += 1;
    }
    if n > 0 {
        sum.iter_mut().for_each(|s| *s /= n as f64);
    }
    DocFeatures {
        vector: sum,
        all_oov: n == 0,
    }
}

pub fn featurize<S: AsRef<str>>(
    doc: &[S],
    model: &AlignmentModel,
    spaces: &SpaceSet,
    language: &str,
) -> Result<DocFeatures> {
    let space = spaces.get(language)?;
    let projected = doc
        .iter()
        .filter(|t| space.contains(t.as_ref()))
        .map(|t| model.project(t.as_ref(), language, spaces))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_pool(model.shared_dim(), projected.iter().map(Vec::as_slice)))
}

/// Featurizes with a precomputed shared space.
pub fn featurize_in<S: AsRef<str>>(doc: &[S], shared: &SharedSpace) -> DocFeatures {
    mean_pool(shared.dim(), doc.iter().filter_map(|t| shared.vector(t.as_ref())))
}

/// Loss history of a training run: mean regularized log-loss per epoch.
pub type LossHistory = Vec<f64>;

fn objective(features: &[Vec<f64>], labels: &[bool], w: &[f64], b: f64, l2: f64) -> f64 {
    let n = features.len() as f64;
    let data: f64 = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let z = dot(w, x) + b;
            // log(1 + e^z) - y z, computed stably
            let softplus = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
            softplus - if y { z } else { 0.0 }
        })
        .sum::<f64>()
        / n;
    data + 0.5 * l2 * dot(w, w)
}

/// Per-feature mean and standard deviation; constant features keep scale 1.
fn standardization(features: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = features[0].len();
    let n = features.len() as f64;
    let mut mean = vec![0.0; d];
    for x in features {
        mean.iter_mut().zip(x).for_each(|(m, v)| *m += v / n);
    }
    let mut var = vec![0.0; d];
    for x in features {
        var.iter_mut().zip(x).zip(&mean).for_each(|((s, v), m)| *s += (v - m) * (v - m) / n);
    }
    let scale = var.iter().map(|v| if v.sqrt() > 1e-12 { v.sqrt() } else { 1.0 }).collect();
    (mean, scale)
}

/// Full-batch gradient descent on the L2-regularized logistic loss.
pub fn train_logreg(
    features: &[Vec<f64>],
    labels: &[bool],
    language: &str,
    cfg: &ClassifyConfig,
) -> Result<(ClassifierModel, LossHistory)> {
    cfg.validate()?;
    if features.len() != labels.len() {
        return Err(Error::Dimension {
            expected: features.len(),
            actual: labels.len(),
        });
    }
    if features.len() < 2 {
        return Err(Error::Degenerate("need at least 2 training examples".into()));
    }
    let positives = labels.iter().filter(|y| **y).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Degenerate("training labels contain a single class".into()));
    }
    let d = features[0].len();
    if let Some(bad) = features.iter().find(|x| x.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            actual: bad.len(),
        });
    }

    let (shift, scale) = if cfg.standardize {
        standardization(features)
    } else {
        (vec![0.0; d], vec![1.0; d])
    };
    let scaled: Vec<Vec<f64>> = features
        .iter()
        .map(|x| x.iter().zip(&shift).zip(&scale).map(|((v, m), s)| (v - m) / s).collect())
        .collect();
    let features = &scaled;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.init_seed);
    let mut w: Vec<f64> = (0..d)
        .map(|_| {
            if cfg.init_jitter > 0.0 {
                rng.random_range(-cfg.init_jitter..cfg.init_jitter)
            } else {
                0.0
            }
        })
        .collect();
    let mut b = 0.0;
    let n = features.len() as f64;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut grad = vec![0.0; d];
    for _ in 0..cfg.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (x, &y) in features.iter().zip(labels) {
            let err = sigmoid(dot(&w, x) + b) - if y { 1.0 } else { 0.0 };
            grad.iter_mut().zip(x).for_each(|(g, xi)| *g += err * xi);
            grad_b += err;
        }
        for (wi, g) in w.iter_mut().zip(&grad) {
            *wi -= cfg.learning_rate * (g / n + cfg.l2 * *wi);
        }
        b -= cfg.learning_rate * grad_b / n;
        history.push(objective(features, labels, &w, b, cfg.l2));
    }
    if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
        return Err(Error::Degenerate("training diverged; lower the learning rate".into()));
    }
    let b = b - w.iter().zip(&shift).zip(&scale).map(|((wi, m), s)| wi * m / s).sum::<f64>();
    let w: Vec<f64> = w.iter().zip(&scale).map(|(wi, s)| wi / s).collect();
    Ok((
        ClassifierModel {
            weights: w,
            bias: b,
            language: language.to_string(),
            epochs: cfg.epochs,
            l2: cfg.l2,
            seed: cfg.init_seed,
        },
        history,
    ))
}

/// Confusion counts and rates with hate as the positive class.
pub fn evaluate(model: &ClassifierModel, features: &[Vec<f64>], labels: &[bool], threshold: f64) -> Result<Metrics> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (x, &y) in features.iter().zip(labels) {
        let predicted = model.probability(x)? >= threshold;
        match (predicted, y) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(Metrics::from_counts(tp, fp, fn_, tn))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Train and test languages must differ.
    ZeroShot,
    /// Train and test languages must coincide.
    Monolingual,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalOutcome {
    pub train_lang: String,
    pub test_lang: String,
    pub mode: EvalMode,
    pub metrics: Metrics,
    pub train_docs: usize,
    pub test_docs: usize,
    pub train_all_oov: usize,
    pub test_all_oov: usize,
    pub classifier: ClassifierModel,
}

/// Featurizes every document of `ds` in its own language.
pub fn featurize_dataset(
    ds: &LabeledDataset,
    model: &AlignmentModel,
    spaces: &SpaceSet,
) -> Result<(Vec<Vec<f64>>, Vec<bool>, usize)> {
    let shared = SharedSpace::build(model, spaces.get(&ds.language)?)?;
    let mut features = Vec::with_capacity(ds.len());
    let mut oov = 0;
    for doc in &ds.docs {
        let f = featurize_in(&doc.tokens, &shared);
        oov += usize::from(f.all_oov);
        features.push(f.vector);
    }
    Ok((features, ds.docs.iter().map(|d| d.label.is_hate()).collect(), oov))
}

/// Trains on `train_ds` only and scores `test_ds`.
pub fn zero_shot_eval(
    train_ds: &LabeledDataset,
    test_ds: &LabeledDataset,
    model: &AlignmentModel,
    spaces: &SpaceSet,
    cfg: &ClassifyConfig,
    mode: EvalMode,
) -> Result<EvalOutcome> {
    let same = train_ds.language == test_ds.language;
    match (mode, same) {
        (EvalMode::ZeroShot, true) => {
            return Err(Error::Protocol(format!(
                "zero-shot evaluation needs different languages (both are '{}'); use monolingual mode",
                train_ds.language
            )))
        }
        (EvalMode::Monolingual, false) => {
            return Err(Error::Protocol(format!(
                "monolingual evaluation got {} and {}",
                train_ds.language, test_ds.language
            )))
        }
        _ => {}
    }
    for lang in [&train_ds.language, &test_ds.language] {
        if !model.has_language(lang) {
            return Err(Error::Config(format!("language '{lang}' is not in the alignment model")));
        }
    }
    let (train_x, train_y, train_oov) = featurize_dataset(train_ds, model, spaces)?;
    let (classifier, _) = train_logreg(&train_x, &train_y, &train_ds.language, cfg)?;
    let (test_x, test_y, test_oov) = featurize_dataset(test_ds, model, spaces)?;
    let metrics = evaluate(&classifier, &test_x, &test_y, cfg.threshold)?;
    Ok(EvalOutcome {
        train_lang: train_ds.language.clone(),
        test_lang: test_ds.language.clone(),
        mode,
        metrics,
        train_docs: train_x.len(),
        test_docs: test_x.len(),
        train_all_oov: train_oov,
        test_all_oov: test_oov,
        classifier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_is_indifferent() {
        let m = ClassifierModel {
            weights: vec![0.0; 3],
            bias: 0.0,
            language: "en".into(),
            epochs: 0,
            l2: 0.0,
            seed: 0,
        };
        assert_eq!(m.probability(&[5.0, -2.0, 1.0]).unwrap(), 0.5);
        assert!(matches!(m.probability(&[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn confusion_arithmetic() {
        let m = Metrics::from_counts(2, 1, 1, 6);
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.total(), 10);
        let zero = Metrics::from_counts(0, 3, 2, 5);
        assert_eq!((zero.precision, zero.recall, zero.f1), (0.0, 0.0, 0.0));
        let none = Metrics::from_counts(0, 0, 0, 4);
        assert_eq!(none.f1, 0.0);
        assert_eq!(none.accuracy, 1.0);
    }

    #[test]
    fn separable_pair_reaches_perfect_f1() {
        let x = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let y = vec![true, false];
        let cfg = ClassifyConfig {
            epochs: 500,
            learning_rate: 0.1,
            ..ClassifyConfig::default()
        };
        let (model, _) = train_logreg(&x, &y, "en", &cfg).unwrap();
        assert_eq!(evaluate(&model, &x, &y, 0.5).unwrap().f1, 1.0);
    }

    #[test]
    fn single_class_is_degenerate() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            train_logreg(&x, &[true, true], "en", &ClassifyConfig::default()),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            train_logreg(&x[..1], &[true], "en", &ClassifyConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn mean_pool_of_nothing_is_flagged() {
        let f = mean_pool(3, std::iter::empty());
        assert!(f.all_oov);
        assert_eq!(f.vector, vec![0.0; 3]);
    }
}
