//! CCA alignment of monolingual spaces into one shared space.
//!
//! Every non-pivot language is paired with the pivot through a bilingual
//! lexicon. For language `L`, CCA yields projections `V` (pivot side) and
//! `W` (`L` side). A vector `y` of `L` maps into the pivot's own space as
//!
//! ```text
//! shared(y) = (y - mean_L) · W · pinv(V) + mean_pivot
//! ```
//!
//! Pivot vectors map to themselves.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::{restrict_to_vocab, BilingualLexicon};

/// Relative eigenvalue floor below which a covariance counts as singular.
const SINGULAR_RTOL: f64 = 1e-12;
/// Relative singular-value floor for pseudo-inverses.
const PINV_RTOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CcaResult {
    /// `d_src × k`
    pub proj_src: DMatrix<f64>,
    /// `d_tgt × k`
    pub proj_tgt: DMatrix<f64>,
    /// Canonical correlations, descending.
    pub correlations: Vec<f64>,
    pub means_src: DVector<f64>,
    pub means_tgt: DVector<f64>,
}

fn column_means(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows() as f64;
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n))
}

fn centered(m: &DMatrix<f64>, means: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut row in out.row_iter_mut() {
        row -= means.transpose();
    }
    out
}

/// `C^(-1/2)` of a symmetric matrix through its eigendecomposition.
fn inverse_sqrt(cov: DMatrix<f64>, side: &str) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(cov);
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= max * SINGULAR_RTOL {
        return Err(Error::Singular(format!(
            "{side} covariance has eigenvalue {min:e} (max {max:e})"
        )));
    }
    let scale = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    Ok(&eig.eigenvectors * scale * eig.eigenvectors.transpose())
}

/// Moore-Penrose pseudo-inverse; singular values under `1e-10 · σ_max` are
/// treated as zero.
pub fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let inv = svd
        .singular_values
        .map(|s| if s > max * PINV_RTOL { 1.0 / s } else { 0.0 });
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    v_t.transpose() * DMatrix::from_diagonal(&inv) * u.transpose()
}

/// Canonical correlation analysis of row-paired samples `x` and `y`.
///
/// Covariances are population covariances (divided by `n`), regularized
/// with `lambda · I`. `kept_ratio` selects `ceil(kept_ratio · min(d1, d2))`
/// leading directions, capped at the number of pairs.
pub fn fit_cca(x: &DMatrix<f64>, y: &DMatrix<f64>, lambda: f64, kept_ratio: f64) -> Result<CcaResult> {
    if x.nrows() != y.nrows() {
        return Err(Error::Dimension {
            expected: x.nrows(),
            actual: y.nrows(),
        });
    }
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InsufficientData(format!("CCA needs at least 2 pairs, got {n}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("lambda must be >= 0, got {lambda}")));
    }
    if !(kept_ratio > 0.0 && kept_ratio <= 1.0) {
        return Err(Error::Config(format!("kept_ratio must lie in (0, 1], got {kept_ratio}")));
    }
    let (d1, d2) = (x.ncols(), y.ncols());
    let means_src = column_means(x);
    let means_tgt = column_means(y);
    let xc = centered(x, &means_src);
    let yc = centered(y, &means_tgt);
    let nf = n as f64;
    let cxx = xc.transpose() * &xc / nf + DMatrix::identity(d1, d1) * lambda;
    let cyy = yc.transpose() * &yc / nf + DMatrix::identity(d2, d2) * lambda;
    let cxy = xc.transpose() * &yc / nf;

    let wx = inverse_sqrt(cxx, "source")?;
    let wy = inverse_sqrt(cyy, "target")?;
    let svd = (&wx * cxy * &wy).svd(true, true);
    let u = svd.u.unwrap();
    let v = svd.v_t.unwrap().transpose();

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|a, b| svd.singular_values[*b].total_cmp(&svd.singular_values[*a]));
    let k = ((kept_ratio * d1.min(d2) as f64).ceil() as usize)
        .clamp(1, d1.min(d2).min(n));
    let order = &order[..k];

    let u_k = DMatrix::from_columns(&order.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
    let v_k = DMatrix::from_columns(&order.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
    Ok(CcaResult {
        proj_src: wx * u_k,
        proj_tgt: wy * v_k,
        correlations: order.iter().map(|&i| svd.singular_values[i]).collect(),
        means_src,
        means_tgt,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignConfig {
    pub pivot: String,
    pub lambda: f64,
    pub kept_ratio: f64,
    /// Length-normalize vectors before fitting and before projecting.
    pub normalize: bool,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            pivot: "en".into(),
            lambda: 1e-3,
            kept_ratio: 0.8,
            normalize: true,
        }
    }
}

/// Affine map from one language's space into the shared (pivot) space.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageMap {
    pub mean: DVector<f64>,
    /// `dim × k`
    pub projection: DMatrix<f64>,
    /// `k × pivot_dim`
    pub back_map: DMatrix<f64>,
    pub offset: DVector<f64>,
    combined: DMatrix<f64>,
}

impl LanguageMap {
    pub fn new(
        mean: DVector<f64>,
        projection: DMatrix<f64>,
        back_map: DMatrix<f64>,
        offset: DVector<f64>,
    ) -> Result<Self> {
        if projection.ncols() != back_map.nrows()
            || projection.nrows() != mean.len()
            || back_map.ncols() != offset.len()
        {
            return Err(Error::Dimension {
                expected: projection.ncols(),
                actual: back_map.nrows(),
            });
        }
        let combined = &projection * &back_map;
        Ok(LanguageMap {
            mean,
            projection,
            back_map,
            offset,
            combined,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn kept(&self) -> usize {
        self.projection.ncols()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let centered = DVector::from_iterator(v.len(), v.iter().zip(self.mean.iter()).map(|(a, m)| a - m));
        let shared = self.combined.tr_mul(&centered) + &self.offset;
        shared.iter().copied().collect()
    }
}

/// Result of fitting one language against the pivot.
#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub language: String,
    pub pairs: usize,
    pub dropped_pairs: usize,
    pub correlations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentModel {
    pivot: String,
    pivot_dim: usize,
    lambda: f64,
    kept_ratio: f64,
    normalize: bool,
    maps: BTreeMap<String, LanguageMap>,
}

/// Monolingual spaces keyed by language code.
#[derive(Debug, Clone, Default)]
pub struct SpaceSet(BTreeMap<String, EmbeddingSpace>);

impl SpaceSet {
    pub fn new() -> Self {
        SpaceSet::default()
    }

    pub fn insert(&mut self, space: EmbeddingSpace) {
        self.0.insert(space.language().to_string(), space);
    }

    pub fn get(&self, language: &str) -> Result<&EmbeddingSpace> {
        self.0
            .get(language)
            .ok_or_else(|| Error::Config(format!("no embedding space for language '{language}'")))
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &EmbeddingSpace> {
        self.0.values()
    }
}

impl FromIterator<EmbeddingSpace> for SpaceSet {
    fn from_iter<I: IntoIterator<Item = EmbeddingSpace>>(iter: I) -> Self {
        let mut set = SpaceSet::new();
        for space in iter {
            set.insert(space);
        }
        set
    }
}

fn unit(v: &[f32], normalize: bool) -> Vec<f64> {
    let v: Vec<f64> = v.iter().map(|x| f64::from(*x)).collect();
    if !normalize {
        return v;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn pair_matrix(space: &EmbeddingSpace, words: &[&str], normalize: bool) -> DMatrix<f64> {
    let rows: Vec<f64> = words
        .iter()
        .flat_map(|w| unit(space.vector(w).expect("restricted lexicon word"), normalize))
        .collect();
    DMatrix::from_row_slice(words.len(), space.dim(), &rows)
}

/// Fits every non-pivot language against the pivot with its lexicon.
pub fn fit_hub_alignment(
    spaces: &SpaceSet,
    lexicons: &[BilingualLexicon],
    cfg: &AlignConfig,
) -> Result<(AlignmentModel, Vec<FitSummary>)> {
    let pivot_space = spaces.get(&cfg.pivot)?;
    let mut model = AlignmentModel {
        pivot: cfg.pivot.clone(),
        pivot_dim: pivot_space.dim(),
        lambda: cfg.lambda,
        kept_ratio: cfg.kept_ratio,
        normalize: cfg.normalize,
        maps: BTreeMap::new(),
    };
    for lex in lexicons {
        if lex.src_lang() != cfg.pivot {
            return Err(Error::Config(format!(
                "lexicon {}->{} must have the pivot '{}' as source",
                lex.src_lang(),
                lex.tgt_lang(),
                cfg.pivot
            )));
        }
        spaces.get(lex.tgt_lang())?;
    }

    let mut summaries = Vec::new();
    for language in spaces.languages().filter(|l| *l != cfg.pivot) {
        let mut matching = lexicons.iter().filter(|l| l.tgt_lang() == language);
        let lex = match (matching.next(), matching.next()) {
            (Some(lex), None) => lex,
            (None, _) => {
                return Err(Error::Config(format!(
                    "no lexicon {}->{language}",
                    cfg.pivot
                )))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(format!(
                    "more than one lexicon {}->{language}",
                    cfg.pivot
                )))
            }
        };
        let tag = |e: Error| Error::Alignment {
            src: cfg.pivot.clone(),
            tgt: language.to_string(),
            source: Box::new(e),
        };
        let space = spaces.get(language)?;
        let (restricted, dropped) = restrict_to_vocab(lex, pivot_space, space).map_err(tag)?;
        let src_words: Vec<&str> = restricted.pairs().iter().map(|(s, _)| s.as_str()).collect();
        let tgt_words: Vec<&str> = restricted.pairs().iter().map(|(_, t)| t.as_str()).collect();
        let x = pair_matrix(pivot_space, &src_words, cfg.normalize);
        let y = pair_matrix(space, &tgt_words, cfg.normalize);
        let cca = fit_cca(&x, &y, cfg.lambda, cfg.kept_ratio).map_err(tag)?;
        let map = LanguageMap::new(
            cca.means_tgt,
            cca.proj_tgt,
            pseudo_inverse(&cca.proj_src),
            cca.means_src,
        )?;
        log::info!(
            "aligned {language} to {} on {} pairs ({dropped} dropped), top correlation {:.4}",
            cfg.pivot,
            restricted.len(),
            cca.correlations.first().copied().unwrap_or(0.0)
        );
        summaries.push(FitSummary {
            language: language.to_string(),
            pairs: restricted.len(),
            dropped_pairs: dropped,
            correlations: cca.correlations,
        });
        model.maps.insert(language.to_string(), map);
    }
    Ok((model, summaries))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelMeta {
    pivot: String,
    pivot_dim: usize,
    lambda: f64,
    kept_ratio: f64,
    normalize: bool,
    languages: Vec<LanguageMeta>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LanguageMeta {
    language: String,
    dim: usize,
    kept: usize,
}

const META_FILE: &str = "model.json";

fn write_block(out: &mut String, rows: usize, cols: usize, value: impl Fn(usize, usize) -> f64) {
    writeln!(out, "{rows} {cols}").unwrap();
    for r in 0..rows {
        let line: Vec<String> = (0..cols).map(|c| format!("{:?}", value(r, c))).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
}

fn read_block<'a, I: Iterator<Item = (usize, &'a str)>>(lines: &mut I) -> Result<DMatrix<f64>> {
    let (no, header) = lines
        .next()
        .ok_or_else(|| Error::format(0, "unexpected end of matrix file"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::format(no, "bad matrix header")))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::format(no, "matrix header must be '<rows> <cols>'"));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::format(no, "matrix ends early"))?;
        let before = data.len();
        for t in line.split_whitespace() {
            data.push(t.parse::<f64>().map_err(|_| Error::format(no, format!("bad number '{t}'")))?);
        }
        if data.len() - before != cols {
            return Err(Error::format(no, format!("expected {cols} values")));
        }
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

impl AlignmentModel {
    pub fn pivot(&self) -> &str {
        &self.pivot
    }

    /// Dimension of the shared space (the pivot's dimension).
    pub fn shared_dim(&self) -> usize {
        self.pivot_dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kept_ratio(&self) -> f64 {
        self.kept_ratio
    }

    pub fn normalize(&self) -> bool {
        self.normalize
    }

    pub fn language_map(&self, language: &str) -> Option<&LanguageMap> {
        self.maps.get(language)
    }

    /// All languages including the pivot, sorted.
    pub fn languages(&self) -> Vec<&str> {
        let mut langs: Vec<&str> = self.maps.keys().map(String::as_str).collect();
        langs.push(&self.pivot);
        langs.sort_unstable();
        langs
    }

    pub fn has_language(&self, language: &str) -> bool {
        language == self.pivot || self.maps.contains_key(language)
    }

    /// Maps a raw vector of `language` into the shared space.
    pub fn map_vector(&self, language: &str, v: &[f32]) -> Result<Vec<f64>> {
        let v = unit(v, self.normalize);
        if language == self.pivot {
            if v.len() != self.pivot_dim {
                return Err(Error::Dimension {
                    expected: self.pivot_dim,
                    actual: v.len(),
                });
            }
            return Ok(v);
        }
        let map = self
            .maps
            .get(language)
            .ok_or_else(|| Error::Config(format!("language '{language}' is not in the alignment model")))?;
        if v.len() != map.dim() {
            return Err(Error::Dimension {
                expected: map.dim(),
                actual: v.len(),
            });
        }
        Ok(map.apply(&v))
    }

    /// Shared-space vector of `word` in `language`.
    pub fn project(&self, word: &str, language: &str, spaces: &SpaceSet) -> Result<Vec<f64>> {
        if !self.has_language(language) {
            return Err(Error::Config(format!("language '{language}' is not in the alignment model")));
        }
        let space = spaces.get(language)?;
        let v = space
            .vector(word)
            .ok_or_else(|| Error::NotFound(format!("'{word}' is not in the {language} vocabulary")))?;
        self.map_vector(language, v)
    }

    /// Writes `model.json` plus one `<lang>.txt` matrix file per non-pivot
    /// language holding four blocks: centering row, projection, back-map and
    /// offset row. Values use round-trip float formatting.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let meta = ModelMeta {
            pivot: self.pivot.clone(),
            pivot_dim: self.pivot_dim,
            lambda: self.lambda,
            kept_ratio: self.kept_ratio,
            normalize: self.normalize,
            languages: self
                .maps
                .iter()
                .map(|(l, m)| LanguageMeta {
                    language: l.clone(),
                    dim: m.dim(),
                    kept: m.kept(),
                })
                .collect(),
        };
        let path = dir.join(META_FILE);
        let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        for (language, map) in &self.maps {
            let mut out = String::new();
            write_block(&mut out, 1, map.mean.len(), |_, c| map.mean[c]);
            write_block(&mut out, map.projection.nrows(), map.projection.ncols(), |r, c| {
                map.projection[(r, c)]
            });
            write_block(&mut out, map.back_map.nrows(), map.back_map.ncols(), |r, c| {
                map.back_map[(r, c)]
            });
            write_block(&mut out, 1, map.offset.len(), |_, c| map.offset[c]);
            let path = dir.join(format!("{language}.txt"));
            fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let path = dir.join(META_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let meta: ModelMeta = serde_json::from_str(&text)
            .map_err(|e| Error::format(e.line(), format!("{}: {e}", path.display())))?;
        let mut maps = BTreeMap::new();
        for lang in &meta.languages {
            let path = dir.join(format!("{}.txt", lang.language));
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
            let mean = read_block(&mut lines)?;
            let projection = read_block(&mut lines)?;
            let back_map = read_block(&mut lines)?;
            let offset = read_block(&mut lines)?;
            if mean.ncols() != lang.dim
                || projection.ncols() != lang.kept
                || offset.ncols() != meta.pivot_dim
            {
                return Err(Error::Format {
                    line: 0,
                    message: format!("{}: matrix shapes disagree with metadata", path.display()),
                });
            }
            let map = LanguageMap::new(
                DVector::from_iterator(mean.ncols(), mean.iter().copied()),
                projection,
                back_map,
                DVector::from_iterator(offset.ncols(), offset.iter().copied()),
            )?;
            maps.insert(lang.language.clone(), map);
        }
        Ok(AlignmentModel {
            pivot: meta.pivot,
            pivot_dim: meta.pivot_dim,
            lambda: meta.lambda,
            kept_ratio: meta.kept_ratio,
            normalize: meta.normalize,
            maps,
        })
    }
}
