//! Monolingual embedding spaces in word2vec text format.
//!
//! The text layout is a header line `<vocab_count> <dim>` followed by one
//! `<word> <v1> ... <vdim>` line per word. Vectors are kept as `f32` and
//! written with six decimal digits.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One language's vocabulary with a dense row per word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    language: String,
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

/// Non-fatal findings from parsing an embedding file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Rows skipped because their word was already seen.
    pub duplicates: usize,
}

impl EmbeddingSpace {
    /// Builds a space from `(word, vector)` rows. Rows must be unique,
    /// nonzero and all of length `dim`.
    pub fn from_rows<I, S>(language: &str, dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be >= 1".into()));
        }
        let mut space = EmbeddingSpace {
            language: language.to_string(),
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        };
        for (i, (word, vector)) in rows.into_iter().enumerate() {
            let word = word.into();
            if vector.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    actual: vector.len(),
                });
            }
            if vector.iter().all(|v| *v == 0.0) {
                return Err(Error::Domain(format!("row {i} ('{word}') is all zeros")));
            }
            if space.index.contains_key(&word) {
                return Err(Error::Domain(format!("duplicate word '{word}'")));
            }
            space.push(word, &vector);
        }
        if space.words.is_empty() {
            return Err(Error::EmptyInput("embedding space has no words".into()));
        }
        Ok(space)
    }

    fn push(&mut self, word: String, vector: &[f32]) {
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(vector);
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in row order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn row(&self, index: usize) -> &[f32] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn vector(&self, word: &str) -> Option<&[f32]> {
        self.index_of(word).map(|i| self.row(i))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.words
            .iter()
            .map(String::as_str)
            .zip(self.data.chunks_exact(self.dim))
    }

    /// Returns a copy with every row scaled to unit Euclidean norm.
    pub fn l2_normalized(&self) -> EmbeddingSpace {
        let mut out = self.clone();
        for row in out.data.chunks_exact_mut(self.dim) {
            let norm = row
                .iter()
                .map(|v| f64::from(*v) * f64::from(*v))
                .sum::<f64>()
                .sqrt();
            for v in row.iter_mut() {
                *v = (f64::from(*v) / norm) as f32;
            }
        }
        out
    }

    /// Parses word2vec text from any reader.
    pub fn read_word2vec<R: BufRead>(reader: R, language: &str) -> Result<(Self, LoadStats)> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line.map_err(|e| Error::io("<reader>", e))?,
            None => return Err(Error::EmptyInput("missing header line".into())),
        };
        let mut parts = header.split_whitespace();
        let (count, dim) = match (parts.next(), parts.next(), parts.next()) {
            (Some(c), Some(d), None) => {
                let count = c
                    .parse::<usize>()
                    .map_err(|_| Error::format(1, format!("bad vocab count '{c}'")))?;
                let dim = d
                    .parse::<usize>()
                    .map_err(|_| Error::format(1, format!("bad dimension '{d}'")))?;
                (count, dim)
            }
            _ => return Err(Error::format(1, "header must be '<vocab_count> <dim>'")),
        };
        if count == 0 {
            return Err(Error::EmptyInput("header declares zero words".into()));
        }
        if dim == 0 {
            return Err(Error::format(1, "dimension must be >= 1"));
        }

        let mut space = EmbeddingSpace {
            language: language.to_string(),
            dim,
            words: Vec::with_capacity(count),
            index: HashMap::with_capacity(count),
            data: Vec::with_capacity(count * dim),
        };
        let mut stats = LoadStats::default();
        let mut vector = Vec::with_capacity(dim);
        for row in 0..count {
            let line_no = row + 2;
            let line = match lines.next() {
                Some(line) => line.map_err(|e| Error::io("<reader>", e))?,
                None => {
                    return Err(Error::format(
                        line_no,
                        format!("header declares {count} rows but file has {row}"),
                    ))
                }
            };
            let mut fields = line.split_whitespace();
            let word = fields
                .next()
                .ok_or_else(|| Error::format(line_no, "empty row"))?;
            vector.clear();
            for field in fields {
                let v = field
                    .parse::<f32>()
                    .map_err(|_| Error::format(line_no, format!("bad number '{field}'")))?;
                if !v.is_finite() {
                    return Err(Error::format(line_no, format!("non-finite value '{field}'")));
                }
                vector.push(v);
            }
            if vector.len() != dim {
                return Err(Error::format(
                    line_no,
                    format!("expected {dim} values, found {}", vector.len()),
                ));
            }
            if vector.iter().all(|v| *v == 0.0) {
                return Err(Error::format(line_no, format!("zero vector for '{word}'")));
            }
            if space.index.contains_key(word) {
                stats.duplicates += 1;
                continue;
            }
            space.push(word.to_string(), &vector);
        }
        if let Some(extra) = lines.find(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty())) {
            extra.map_err(|e| Error::io("<reader>", e))?;
            return Err(Error::format(
                count + 2,
                format!("header declares {count} rows but more follow"),
            ));
        }
        if stats.duplicates > 0 {
            log::warn!(
                "{} duplicate word rows ignored ({language})",
                stats.duplicates
            );
        }
        Ok((space, stats))
    }

    /// Writes word2vec text, six decimal digits per component.
    pub fn write_word2vec<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for (word, row) in self.rows() {
            out.write_all(word.as_bytes())?;
            for v in row {
                write!(out, " {v:.6}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

/// Loads a word2vec text file. Duplicate words keep their first row.
pub fn load_embeddings(path: impl AsRef<Path>, language: &str) -> Result<(EmbeddingSpace, LoadStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingSpace::read_word2vec(BufReader::new(file), language)
}

pub fn save_embeddings(space: &EmbeddingSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    space
        .write_word2vec(BufWriter::new(file))
        .map_err(|e| Error::io(path, e))
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine<T: Copy + Into<f64>>(u: &[T], v: &[T]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (a, b) in u.iter().zip(v) {
        let (a, b) = ((*a).into(), (*b).into());
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::UndefinedSimilarity);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}
