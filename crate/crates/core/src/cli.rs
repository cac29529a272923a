//! Command-line driver.
//!
//! Every subcommand reads an optional TOML run config (`--config`), applies
//! flag overrides, validates the result and writes its outputs together
//! with a `manifest.json` into the output directory. Exit codes: 0 success,
//! 1 usage or configuration error, 2 data or format error.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::alignment::{fit_hub_alignment, AlignConfig, AlignmentModel, SpaceSet};
use crate::classify::{zero_shot_eval, ClassifyConfig, EvalMode, Metrics};
use crate::corpus::{filter_corpus, load_seeds, read_tokenized, TokenizerConfig};
use crate::dataset::{load_labeled_dataset, Label, LabeledDataset};
use crate::embedding::{load_embeddings, save_embeddings};
use crate::error::{Error, Result};
use crate::lexicon::{load_lexicon, split_lexicon, BilingualLexicon};
use crate::retrieval::{bli_precision_at_k, knn};
use crate::rules::{mine_rules, MiningConfig};
use crate::sgns::{train_sgns, SgnsConfig};
use crate::similarity::{cross_lingual_report, SimVariant, SimilarityConfig};
use crate::stopwords;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Input locations; every map is keyed by language code.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub embeddings: BTreeMap<String, PathBuf>,
    /// Lexicons pivot → language, keyed by the target language.
    pub lexicons: BTreeMap<String, PathBuf>,
    pub datasets: BTreeMap<String, PathBuf>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tokenizer: TokenizerConfig,
    pub sgns: SgnsConfig,
    pub alignment: AlignConfig,
    pub mining: MiningConfig,
    pub similarity: SimilarityConfig,
    pub classify: ClassifyConfig,
    pub paths: PathsConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.sgns.validate()?;
        self.mining.validate()?;
        self.classify.validate()?;
        let a = &self.alignment;
        if !(a.lambda >= 0.0 && a.lambda.is_finite()) {
            return Err(Error::Config("alignment.lambda must be >= 0".into()));
        }
        if !(a.kept_ratio > 0.0 && a.kept_ratio <= 1.0) {
            return Err(Error::Config("alignment.kept_ratio must lie in (0, 1]".into()));
        }
        if a.pivot.is_empty() {
            return Err(Error::Config("alignment.pivot must be set".into()));
        }
        if self.similarity.top_m == 0 {
            return Err(Error::Config("similarity.top_m must be >= 1".into()));
        }
        let c = &self.classify;
        if !(c.train_fraction > 0.0 && c.dev_fraction >= 0.0 && c.train_fraction + c.dev_fraction < 1.0) {
            return Err(Error::Config(
                "classify.train_fraction + classify.dev_fraction must leave test data".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(name = "xlemb", version, about = "Domain-specific multilingual word embeddings")]
struct Cli {
    /// TOML run config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides paths.output_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct EmbeddingArgs {
    /// `lang=path` of a word2vec text file; repeatable.
    #[arg(long = "embeddings", value_parser = parse_lang_path)]
    embeddings: Vec<(String, PathBuf)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Keep corpus lines containing at least one seed term.
    FilterCorpus {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seeds: PathBuf,
    },
    /// Train skip-gram embeddings for one language.
    TrainEmbeddings {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lang: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        negatives: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        lr: Option<f32>,
        #[arg(long)]
        min_count: Option<usize>,
        #[arg(long)]
        subsample: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit the CCA hub alignment.
    Align {
        #[command(flatten)]
        emb: EmbeddingArgs,
        /// `lang=path` of a pivot→lang lexicon TSV; repeatable.
        #[arg(long = "lexicon", value_parser = parse_lang_path)]
        lexicons: Vec<(String, PathBuf)>,
        #[arg(long)]
        pivot: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        kept_ratio: Option<f64>,
        #[arg(long)]
        no_normalize: bool,
        /// Hold out this fraction of source words per lexicon for BLI.
        #[arg(long)]
        holdout: Option<f64>,
        #[arg(long, default_value_t = 1)]
        split_seed: u64,
    },
    /// BLI precision@k against a held-out lexicon.
    Bli {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        #[arg(long)]
        validation: PathBuf,
        #[arg(long)]
        src: String,
        #[arg(long)]
        tgt: String,
        /// Comma-separated cutoffs.
        #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
        k: Vec<usize>,
    },
    /// Cross-lingual nearest neighbors of one word.
    Knn {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        #[arg(long)]
        word: String,
        #[arg(long)]
        lang: String,
        /// Target language; repeatable.
        #[arg(long = "target", required = true)]
        targets: Vec<String>,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Association rules for the most frequent words of a dataset.
    MineRules {
        #[arg(long, value_parser = parse_lang_path)]
        dataset: (String, PathBuf),
        /// hate, non-hate or all
        #[arg(long, default_value = "hate")]
        class: String,
        #[arg(long)]
        top_n: Option<usize>,
        #[arg(long)]
        min_support: Option<f64>,
        #[arg(long)]
        min_confidence: Option<f64>,
    },
    /// Context-similarity report for seed terms across languages.
    ContextSim {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        #[arg(long = "dataset", value_parser = parse_lang_path)]
        datasets: Vec<(String, PathBuf)>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<String>,
        #[arg(long)]
        seed_lang: String,
        /// hate, non-hate or both
        #[arg(long, default_value = "both")]
        class: String,
        #[arg(long)]
        variant: Option<SimVariant>,
        #[arg(long)]
        top_m: Option<usize>,
    },
    /// Zero-shot (and monolingual) classification F-scores.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        #[arg(long = "dataset", value_parser = parse_lang_path)]
        datasets: Vec<(String, PathBuf)>,
        /// Training language; all dataset languages when omitted.
        #[arg(long)]
        train: Option<String>,
        /// Test language; all other languages when omitted.
        #[arg(long)]
        test: Option<String>,
        /// Also (or, with equal --train/--test, only) run monolingual baselines.
        #[arg(long)]
        monolingual: bool,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        l2: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        split_seed: Option<u64>,
    },
    /// Flatten knn / context-sim JSON-lines into a TSV table.
    Report {
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
    },
}

fn parse_lang_path(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((lang, path)) if !lang.is_empty() && !path.is_empty() => Ok((lang.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected LANG=PATH, got '{s}'")),
    }
}

impl std::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero-shot" => Ok(EvalMode::ZeroShot),
            "monolingual" => Ok(EvalMode::Monolingual),
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

impl clap::ValueEnum for SimVariant {
    fn value_variants<'a>() -> &'a [Self] {
        &[SimVariant::Literal, SimVariant::Bounded]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            SimVariant::Literal => "literal",
            SimVariant::Bounded => "bounded",
        }))
    }
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

/// Provenance record written next to every output.
#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    argv: &'a [String],
    config: &'a RunConfig,
    seeds: BTreeMap<&'a str, u64>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    created_unix: u64,
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn digest_inputs(paths: &BTreeSet<PathBuf>) -> Result<Vec<InputDigest>> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|e| Error::io(path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            for p in entries {
                out.push(InputDigest {
                    sha256: sha256_file(&p)?,
                    path: p.display().to_string(),
                });
            }
        } else {
            out.push(InputDigest {
                sha256: sha256_file(path)?,
                path: path.display().to_string(),
            });
        }
    }
    Ok(out)
}

/// Collects inputs and outputs of one subcommand run.
struct Run<'a> {
    command: &'a str,
    argv: &'a [String],
    config: RunConfig,
    out_dir: PathBuf,
    inputs: BTreeSet<PathBuf>,
    outputs: Vec<String>,
    seeds: BTreeMap<&'a str, u64>,
}

impl Run<'_> {
    fn input(&mut self, path: &Path) -> PathBuf {
        self.inputs.insert(path.to_path_buf());
        path.to_path_buf()
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    fn finish(self) -> Result<()> {
        let manifest = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            argv: self.argv,
            config: &self.config,
            seeds: self.seeds,
            inputs: digest_inputs(&self.inputs)?,
            outputs: self.outputs,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let path = self.out_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }
}

fn jsonl<T: Serialize>(records: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r).expect("record serializes"));
        out.push('\n');
    }
    out
}

fn merged(cli: Vec<(String, PathBuf)>, config: &BTreeMap<String, PathBuf>) -> BTreeMap<String, PathBuf> {
    let mut map = config.clone();
    map.extend(cli);
    map
}

fn load_spaces(run: &mut Run<'_>, cli: Vec<(String, PathBuf)>) -> Result<SpaceSet> {
    let paths = merged(cli, &run.config.paths.embeddings);
    run.config.paths.embeddings = paths.clone();
    if paths.is_empty() {
        return Err(Error::Config("no embeddings given (use --embeddings LANG=PATH)".into()));
    }
    let mut spaces = SpaceSet::new();
    for (lang, path) in paths {
        let path = run.input(&path);
        let (space, stats) = load_embeddings(&path, &lang)?;
        if stats.duplicates > 0 {
            log::warn!("{}: {} duplicate rows ignored", path.display(), stats.duplicates);
        }
        spaces.insert(space);
    }
    Ok(spaces)
}

fn load_datasets(run: &mut Run<'_>, cli: Vec<(String, PathBuf)>) -> Result<Vec<LabeledDataset>> {
    let paths = merged(cli, &run.config.paths.datasets);
    run.config.paths.datasets = paths.clone();
    if paths.is_empty() {
        return Err(Error::Config("no datasets given (use --dataset LANG=PATH)".into()));
    }
    let mut out = Vec::new();
    for (lang, path) in paths {
        let path = run.input(&path);
        out.push(load_labeled_dataset(&path, &lang, &run.config.tokenizer)?);
    }
    Ok(out)
}

fn load_model(run: &mut Run<'_>, dir: &Path) -> Result<AlignmentModel> {
    let dir = run.input(dir);
    AlignmentModel::load(dir)
}

fn classes(spec: &str) -> Result<Vec<Label>> {
    match spec {
        "both" | "all" => Ok(vec![Label::Hate, Label::NonHate]),
        other => Ok(vec![other.parse()?]),
    }
}

fn execute(command: Command, run: &mut Run<'_>, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::FilterCorpus { input, seeds } => {
            let input = run.input(&input);
            let seeds_path = run.input(&seeds);
            let seeds = load_seeds(&seeds_path, &run.config.tokenizer)?;
            let file = File::open(&input).map_err(|e| Error::io(&input, e))?;
            let lines = BufReader::new(file)
                .lines()
                .collect::<std::io::Result<Vec<String>>>()
                .map_err(|e| Error::io(&input, e))?;
            let total = lines.len();
            let kept: Vec<String> = filter_corpus(lines, &seeds, &run.config.tokenizer)?.collect();
            let mut text = kept.join("\n");
            if !kept.is_empty() {
                text.push('\n');
            }
            run.write("filtered.txt", text.as_bytes())?;
            writeln!(stdout, "kept {} of {total} lines", kept.len()).ok();
        }
        Command::TrainEmbeddings {
            corpus,
            lang,
            dim,
            window,
            negatives,
            epochs,
            lr,
            min_count,
            subsample,
            seed,
            threads,
        } => {
            let s = &mut run.config.sgns;
            s.dim = dim.unwrap_or(s.dim);
            s.window = window.unwrap_or(s.window);
            s.negatives = negatives.unwrap_or(s.negatives);
            s.epochs = epochs.unwrap_or(s.epochs);
            s.learning_rate = lr.unwrap_or(s.learning_rate);
            s.min_count = min_count.unwrap_or(s.min_count);
            s.subsample_t = subsample.unwrap_or(s.subsample_t);
            s.rng_seed = seed.unwrap_or(s.rng_seed);
            s.threads = threads.unwrap_or(s.threads);
            run.config.validate()?;
            run.seeds.insert("sgns", run.config.sgns.rng_seed);
            let corpus = run.input(&corpus);
            let docs = read_tokenized(&corpus, &run.config.tokenizer)?;
            let space = train_sgns(&docs, &lang, &run.config.sgns)?;
            let path = run.out_dir.join(format!("{lang}.vec"));
            fs::create_dir_all(&run.out_dir).map_err(|e| Error::io(&run.out_dir, e))?;
            save_embeddings(&space, &path)?;
            run.outputs.push(format!("{lang}.vec"));
            writeln!(stdout, "trained {} vectors of dim {}", space.len(), space.dim()).ok();
        }
        Command::Align {
            emb,
            lexicons,
            pivot,
            lambda,
            kept_ratio,
            no_normalize,
            holdout,
            split_seed,
        } => {
            let a = &mut run.config.alignment;
            a.pivot = pivot.unwrap_or(a.pivot.clone());
            a.lambda = lambda.unwrap_or(a.lambda);
            a.kept_ratio = kept_ratio.unwrap_or(a.kept_ratio);
            a.normalize = a.normalize && !no_normalize;
            run.config.validate()?;
            let spaces = load_spaces(run, emb.embeddings)?;
            let pivot = run.config.alignment.pivot.clone();
            let lex_paths = merged(lexicons, &run.config.paths.lexicons);
            run.config.paths.lexicons = lex_paths.clone();
            let mut fit_lexicons = Vec::new();
            for (lang, path) in lex_paths {
                let path = run.input(&path);
                let (lex, stats) = load_lexicon(&path, &pivot, &lang)?;
                if stats.multiword > 0 {
                    log::info!("{}: {} multi-word entries dropped", path.display(), stats.multiword);
                }
                let lex = match holdout {
                    Some(fraction) => {
                        run.seeds.insert("lexicon_split", split_seed);
                        let (train, validation) = split_lexicon(&lex, 1.0 - fraction, split_seed)?;
                        run.write(&format!("validation/{pivot}-{lang}.tsv"), lexicon_tsv(&validation).as_bytes())?;
                        train
                    }
                    None => lex,
                };
                fit_lexicons.push(lex);
            }
            let (model, summaries) = fit_hub_alignment(&spaces, &fit_lexicons, &run.config.alignment)?;
            let model_dir = run.out_dir.join("model");
            model.save(&model_dir)?;
            run.outputs.push("model/".into());
            run.write("alignment.jsonl", jsonl(&summaries).as_bytes())?;
            for s in &summaries {
                writeln!(
                    stdout,
                    "{}: {} pairs ({} dropped), top correlation {:.4}",
                    s.language,
                    s.pairs,
                    s.dropped_pairs,
                    s.correlations.first().copied().unwrap_or(0.0)
                )
                .ok();
            }
        }
        Command::Bli {
            model,
            emb,
            validation,
            src,
            tgt,
            k,
        } => {
            run.config.validate()?;
            let model = load_model(run, &model)?;
            let spaces = load_spaces(run, emb.embeddings)?;
            let validation = run.input(&validation);
            let (lex, _) = load_lexicon(&validation, &src, &tgt)?;
            let mut ks = k;
            ks.sort_unstable();
            ks.dedup();
            if ks.first() == Some(&0) || ks.is_empty() {
                return Err(Error::Config("k values must be >= 1".into()));
            }
            let mut out = String::new();
            let mut summary = Vec::new();
            for &k in &ks {
                let report = bli_precision_at_k(&model, &spaces, &lex, k)?;
                if Some(&k) == ks.last() {
                    out.push_str(&jsonl(&report.records));
                }
                writeln!(stdout, "P@{k} {src}->{tgt}: {:.4} ({} words, {} excluded)", report.precision, report.evaluated, report.excluded).ok();
                summary.push(report);
            }
            out.push_str(&jsonl(summary.iter().map(|r| json!({"summary": r}))));
            run.write("bli.jsonl", out.as_bytes())?;
        }
        Command::Knn {
            model,
            emb,
            word,
            lang,
            targets,
            k,
        } => {
            run.config.validate()?;
            let model = load_model(run, &model)?;
            let spaces = load_spaces(run, emb.embeddings)?;
            let mut out = String::new();
            for target in &targets {
                let list = knn(&model, &spaces, &word, &lang, target, k)?;
                for (rank, n) in list.neighbors.iter().enumerate() {
                    let record = json!({
                        "query": list.query,
                        "query_lang": list.query_lang,
                        "target_lang": list.target_lang,
                        "rank": rank + 1,
                        "word": n.word,
                        "score": n.score,
                        "truncated": list.truncated,
                    });
                    out.push_str(&record.to_string());
                    out.push('\n');
                }
            }
            stdout.write_all(out.as_bytes()).ok();
            run.write("knn.jsonl", out.as_bytes())?;
        }
        Command::MineRules {
            dataset,
            class,
            top_n,
            min_support,
            min_confidence,
        } => {
            let m = &mut run.config.mining;
            m.top_n = top_n.unwrap_or(m.top_n);
            m.min_support = min_support.unwrap_or(m.min_support);
            m.min_confidence = min_confidence.unwrap_or(m.min_confidence);
            run.config.validate()?;
            let ds = load_datasets(run, vec![dataset])?.remove(0);
            let mut out = String::new();
            for label in classes(&class)? {
                let docs = ds.partition(label);
                let docs: Vec<Vec<String>> = if run.config.mining.remove_stopwords {
                    stopwords::remove(&docs, &stopwords::for_language(&ds.language))
                } else {
                    docs.iter().map(|d| d.to_vec()).collect()
                };
                let docs: Vec<Vec<String>> = docs.into_iter().filter(|d| !d.is_empty()).collect();
                if docs.is_empty() {
                    continue;
                }
                let m = &run.config.mining;
                let rules = mine_rules(&docs, m.top_n, m.min_support, m.min_confidence)?;
                writeln!(stdout, "{}: {} rules", label.as_str(), rules.len()).ok();
                out.push_str(&jsonl(rules.iter().map(|r| {
                    json!({
                        "language": ds.language,
                        "class": label,
                        "antecedent": r.antecedent,
                        "consequent": r.consequent,
                        "support": r.support,
                        "confidence": r.confidence,
                    })
                })));
            }
            run.write("rules.jsonl", out.as_bytes())?;
            run.write("class_counts.json", (serde_json::to_string_pretty(&ds.counts).unwrap() + "\n").as_bytes())?;
        }
        Command::ContextSim {
            model,
            emb,
            datasets,
            seeds,
            seed_lang,
            class,
            variant,
            top_m,
        } => {
            let s = &mut run.config.similarity;
            s.variant = variant.unwrap_or(s.variant);
            s.top_m = top_m.unwrap_or(s.top_m);
            run.config.validate()?;
            let model = load_model(run, &model)?;
            let spaces = load_spaces(run, emb.embeddings)?;
            let datasets = load_datasets(run, datasets)?;
            let seeds: Vec<String> = seeds.iter().map(|s| s.to_lowercase()).collect();
            let seed_refs: Vec<&str> = seeds.iter().map(String::as_str).collect();
            let mut records = Vec::new();
            for label in classes(&class)? {
                records.extend(cross_lingual_report(
                    &seed_refs,
                    &seed_lang,
                    &datasets,
                    label,
                    &model,
                    &spaces,
                    &run.config.mining,
                    &run.config.similarity,
                )?);
            }
            run.write("context_sim.jsonl", jsonl(&records).as_bytes())?;
            run.write("context_sim.tsv", flatten_report(&to_values(&records))?.as_bytes())?;
            writeln!(stdout, "{} records", records.len()).ok();
        }
        Command::Classify {
            model,
            emb,
            datasets,
            train,
            test,
            monolingual,
            epochs,
            lr,
            l2,
            threshold,
            split_seed,
        } => {
            let c = &mut run.config.classify;
            c.epochs = epochs.unwrap_or(c.epochs);
            c.learning_rate = lr.unwrap_or(c.learning_rate);
            c.l2 = l2.unwrap_or(c.l2);
            c.threshold = threshold.unwrap_or(c.threshold);
            c.split_seed = split_seed.unwrap_or(c.split_seed);
            run.config.validate()?;
            run.seeds.insert("split", run.config.classify.split_seed);
            run.seeds.insert("init", run.config.classify.init_seed);
            let model = load_model(run, &model)?;
            let spaces = load_spaces(run, emb.embeddings)?;
            let datasets = load_datasets(run, datasets)?;
            let cfg = run.config.classify.clone();
            let mut splits = BTreeMap::new();
            for ds in &datasets {
                let (tr, _dev, te) = ds.split(cfg.train_fraction, cfg.dev_fraction, cfg.split_seed)?;
                splits.insert(ds.language.clone(), (tr, te));
            }
            let langs: Vec<String> = splits.keys().cloned().collect();
            let mut plan: Vec<(String, String, EvalMode)> = Vec::new();
            for a in &langs {
                if train.as_ref().is_some_and(|t| t != a) {
                    continue;
                }
                for b in &langs {
                    if test.as_ref().is_some_and(|t| t != b) {
                        continue;
                    }
                    if a == b {
                        if monolingual {
                            plan.push((a.clone(), b.clone(), EvalMode::Monolingual));
                        }
                    } else if !(monolingual && train.is_some() && train == test) {
                        plan.push((a.clone(), b.clone(), EvalMode::ZeroShot));
                    }
                }
            }
            if let (Some(a), Some(b)) = (&train, &test) {
                if a == b && !monolingual {
                    return Err(Error::Protocol(format!(
                        "train and test language are both '{a}'; pass --monolingual"
                    )));
                }
                for l in [a, b] {
                    if !splits.contains_key(l) {
                        return Err(Error::Config(format!("no dataset for language '{l}'")));
                    }
                }
            }
            let mut records = Vec::new();
            let mut tsv = String::from(Metrics::TSV_HEADER);
            tsv.push('\n');
            for (a, b, mode) in plan {
                let outcome = zero_shot_eval(&splits[&a].0, &splits[&b].1, &model, &spaces, &cfg, mode)?;
                tsv.push_str(&outcome.metrics.tsv_row(&a, &b));
                tsv.push('\n');
                writeln!(stdout, "{a} -> {b} ({mode:?}): F1 {:.4}", outcome.metrics.f1).ok();
                records.push(json!({
                    "train": a,
                    "test": b,
                    "mode": mode,
                    "metrics": outcome.metrics,
                    "train_docs": outcome.train_docs,
                    "test_docs": outcome.test_docs,
                    "train_all_oov": outcome.train_all_oov,
                    "test_all_oov": outcome.test_all_oov,
                }));
            }
            run.write("metrics.jsonl", jsonl(&records).as_bytes())?;
            run.write("metrics.tsv", tsv.as_bytes())?;
        }
        Command::Report { input } => {
            let mut values = Vec::new();
            for path in &input {
                let path = run.input(path);
                let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
                for (i, line) in BufReader::new(file).lines().enumerate() {
                    let line = line.map_err(|e| Error::io(&path, e))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    values.push(
                        serde_json::from_str::<Value>(&line).map_err(|e| Error::format(i + 1, e.to_string()))?,
                    );
                }
            }
            let table = flatten_report(&values)?;
            stdout.write_all(table.as_bytes()).ok();
            run.write("report.tsv", table.as_bytes())?;
        }
    }
    Ok(())
}

fn to_values<T: Serialize>(records: &[T]) -> Vec<Value> {
    records.iter().map(|r| serde_json::to_value(r).expect("record serializes")).collect()
}

fn lexicon_tsv(lex: &BilingualLexicon) -> String {
    let mut out = String::new();
    for (src, targets) in lex.grouped() {
        out.push_str(&format!("{src}\t{}\n", targets.join(",")));
    }
    out
}

/// Rows are seed / query words, columns target languages (and class for
/// context-similarity records); cells list `word (score)` entries by rank.
pub fn flatten_report(records: &[Value]) -> Result<String> {
    let mut rows: Vec<String> = Vec::new();
    let mut columns: BTreeSet<String> = BTreeSet::new();
    let mut cells: BTreeMap<(String, String), Vec<(u64, String, f64)>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let field = |name: &str| {
            r.get(name)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| Error::format(i + 1, format!("record lacks '{name}'")))
        };
        if r.get("terms").is_some() {
            let seed = field("seed")?;
            let column = format!("{}:{}", field("class")?, field("target_lang")?);
            let key = (seed.clone(), column.clone());
            let entry = cells.entry(key).or_default();
            if r.get("has_context").and_then(Value::as_bool) == Some(false) {
                entry.push((0, "(no context)".into(), f64::NAN));
            }
            for (rank, t) in r["terms"].as_array().into_iter().flatten().enumerate() {
                entry.push((
                    rank as u64,
                    t["word"].as_str().unwrap_or_default().to_string(),
                    t["score"].as_f64().unwrap_or(f64::NAN),
                ));
            }
            if !rows.contains(&seed) {
                rows.push(seed);
            }
            columns.insert(column);
        } else if r.get("rank").is_some() {
            let query = field("query")?;
            let column = field("target_lang")?;
            cells.entry((query.clone(), column.clone())).or_default().push((
                r["rank"].as_u64().unwrap_or(0),
                field("word")?,
                r["score"].as_f64().unwrap_or(f64::NAN),
            ));
            if !rows.contains(&query) {
                rows.push(query);
            }
            columns.insert(column);
        } else {
            return Err(Error::format(i + 1, "not a knn or context-sim record"));
        }
    }
    let mut out = String::from("term");
    for c in &columns {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    for row in &rows {
        out.push_str(row);
        for c in &columns {
            out.push('\t');
            if let Some(entries) = cells.get_mut(&(row.clone(), c.clone())) {
                entries.sort_by_key(|e| e.0);
                let text: Vec<String> = entries
                    .iter()
                    .map(|(_, w, s)| if s.is_nan() { w.clone() } else { format!("{w} ({s:.2})") })
                    .collect();
                out.push_str(&text.join("; "));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::FilterCorpus { .. } => "filter-corpus",
        Command::TrainEmbeddings { .. } => "train-embeddings",
        Command::Align { .. } => "align",
        Command::Bli { .. } => "bli",
        Command::Knn { .. } => "knn",
        Command::MineRules { .. } => "mine-rules",
        Command::ContextSim { .. } => "context-sim",
        Command::Classify { .. } => "classify",
        Command::Report { .. } => "report",
    }
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_cli_with(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    write!(stdout, "{e}").ok();
                    0
                }
                _ => {
                    write!(stderr, "{}", e.render()).ok();
                    1
                }
            };
            return code;
        }
    };
    let config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                writeln!(stderr, "error: {e}").ok();
                return if e.is_config() { 1 } else { 2 };
            }
        },
        None => RunConfig::default(),
    };
    let out_dir = match cli.out.clone().or_else(|| config.paths.output_dir.clone()) {
        Some(dir) => dir,
        None => {
            writeln!(stderr, "error: no output directory (use --out or paths.output_dir)").ok();
            return 1;
        }
    };
    let mut run = Run {
        command: command_name(&cli.command),
        argv,
        config,
        out_dir: out_dir.clone(),
        inputs: BTreeSet::new(),
        outputs: Vec::new(),
        seeds: BTreeMap::new(),
    };
    if let Some(path) = &cli.config {
        run.input(path);
    }
    let result = fs::create_dir_all(&out_dir)
        .map_err(|e| Error::io(&out_dir, e))
        .and_then(|_| execute(cli.command, &mut run, stdout))
        .and_then(|_| run.finish());
    match result {
        Ok(()) => 0,
        Err(e) => {
            writeln!(stderr, "error: {e}").ok();
            if e.is_config() {
                1
            } else {
                2
            }
        }
    }
}

pub fn run_cli(argv: &[String]) -> i32 {
    run_cli_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}
