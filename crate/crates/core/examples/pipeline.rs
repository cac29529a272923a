// End-to-end run through the command-line driver: filter corpora, train
// three monolingual spaces, align them, then evaluate BLI, nearest
// neighbors, context similarity and zero-shot classification.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use xlemb::cli::run_cli;
use xlemb::synthetic::{topic_corpus, topic_lines, word_name};

type BoxResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

const LANGS: [&str; 3] = ["en", "es", "it"];
const TOPICS: usize = 10;
const WORDS_PER_TOPIC: usize = 20;
const STRUCTURE_SEED: u64 = 9;

fn xlemb(args: &[&str]) -> BoxResult<()> {
    let argv: Vec<String> = std::iter::once("xlemb").chain(args.iter().copied()).map(String::from).collect();
    match run_cli(&argv) {
        0 => Ok(()),
        code => Err(format!("`xlemb {}` exited with {code}", args.join(" ")).into()),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// Writes every input file of the run into `dir`.
pub fn write_inputs(dir: &Path) -> BoxResult<()> {
    fs::create_dir_all(dir)?;
    for (i, lang) in LANGS.iter().enumerate() {
        let mut corpus = topic_corpus(lang, TOPICS, WORDS_PER_TOPIC, 3000, STRUCTURE_SEED, 10 + i as u64).join("\n");
        // off-domain chatter that the seed filter drops
        for j in 0..500 {
            write!(corpus, "\nhttps://example.org @someone weather{} sunny{}", j % 7, j % 5)?;
        }
        fs::write(dir.join(format!("{lang}.txt")), corpus + "\n")?;

        let seeds: Vec<String> = (0..TOPICS * WORDS_PER_TOPIC).step_by(3).map(|w| word_name(lang, w)).collect();
        fs::write(dir.join(format!("{lang}.seeds")), format!("# domain seeds\n{}\n", seeds.join("\n")))?;

        let mut labeled = String::new();
        let lines = topic_lines(lang, TOPICS, WORDS_PER_TOPIC, 1500, STRUCTURE_SEED, 50 + i as u64);
        for (k, (topic, line)) in lines.into_iter().enumerate() {
            // every 12th label flipped: annotator noise
            let hate = (topic < 4) != (k % 12 == 5);
            writeln!(labeled, "{}\t{line}", u8::from(hate))?;
        }
        fs::write(dir.join(format!("{lang}.tsv")), labeled)?;

        if *lang != "en" {
            let mut lexicon = String::new();
            for w in 0..TOPICS * WORDS_PER_TOPIC {
                writeln!(lexicon, "{}\t{}", word_name("en", w), word_name(lang, w))?;
            }
            fs::write(dir.join(format!("en-{lang}.tsv")), lexicon)?;
        }
    }
    Ok(())
}

/// Runs every stage; outputs land below `out`.
pub fn run_pipeline(inputs: &Path, out: &Path) -> BoxResult<()> {
    let mut embeddings = Vec::new();
    for lang in LANGS {
        let filtered = out.join(format!("filter-{lang}"));
        xlemb(&[
            "filter-corpus",
            "--input",
            p(&inputs.join(format!("{lang}.txt"))),
            "--seeds",
            p(&inputs.join(format!("{lang}.seeds"))),
            "--out",
            p(&filtered),
        ])?;
        let emb = out.join(format!("emb-{lang}"));
        xlemb(&[
            "train-embeddings",
            "--corpus",
            p(&filtered.join("filtered.txt")),
            "--lang",
            lang,
            "--dim",
            "24",
            "--epochs",
            "15",
            "--subsample",
            "0",
            "--min-count",
            "3",
            "--seed",
            "3",
            "--out",
            p(&emb),
        ])?;
        embeddings.push(format!("{lang}={}", p(&emb.join(format!("{lang}.vec")))));
    }
    let emb_args: Vec<&str> = embeddings.iter().flat_map(|e| ["--embeddings", e.as_str()]).collect();

    let align = out.join("align");
    let lex_es = format!("es={}", p(&inputs.join("en-es.tsv")));
    let lex_it = format!("it={}", p(&inputs.join("en-it.tsv")));
    let mut args = vec!["align", "--lexicon", &lex_es, "--lexicon", &lex_it, "--holdout", "0.3", "--kept-ratio", "1.0"];
    args.extend(&emb_args);
    args.extend(["--out", p(&align)]);
    xlemb(&args)?;
    let model = align.join("model");

    for tgt in ["es", "it"] {
        let validation = align.join("validation").join(format!("en-{tgt}.tsv"));
        let mut args = vec!["bli", "--model", p(&model), "--validation", p(&validation), "--src", "en", "--tgt", tgt];
        args.extend(&emb_args);
        let dir = out.join(format!("bli-{tgt}"));
        args.extend(["--out", p(&dir)]);
        xlemb(&args)?;
    }

    let query = word_name("en", 5);
    let mut args = vec!["knn", "--model", p(&model), "--word", &query, "--lang", "en", "--target", "es", "--target", "it", "--k", "5"];
    args.extend(&emb_args);
    let knn_dir = out.join("knn");
    args.extend(["--out", p(&knn_dir)]);
    xlemb(&args)?;

    let datasets: Vec<String> = LANGS.iter().map(|l| format!("{l}={}", p(&inputs.join(format!("{l}.tsv"))))).collect();
    let data_args: Vec<&str> = datasets.iter().flat_map(|d| ["--dataset", d.as_str()]).collect();

    let seeds = [word_name("en", 5), word_name("en", 6)].join(",");
    let mut args = vec!["context-sim", "--model", p(&model), "--seeds", &seeds, "--seed-lang", "en", "--class", "hate"];
    args.extend(&emb_args);
    args.extend(&data_args);
    let ctx_dir = out.join("context-sim");
    args.extend(["--out", p(&ctx_dir)]);
    xlemb(&args)?;

    let mut args = vec!["classify", "--model", p(&model), "--monolingual"];
    args.extend(&emb_args);
    args.extend(&data_args);
    let classify_dir = out.join("classify");
    args.extend(["--out", p(&classify_dir)]);
    xlemb(&args)?;

    let knn_out = out.join("knn").join("knn.jsonl");
    xlemb(&["report", "--input", p(&knn_out), "--out", p(&out.join("report"))])?;
    Ok(())
}

pub fn run_example() -> BoxResult<()> {
    let dir = tempfile::tempdir()?;
    let inputs = dir.path().join("inputs");
    let out = dir.path().join("run");
    write_inputs(&inputs)?;
    run_pipeline(&inputs, &out)?;
    println!("\nmetrics.tsv:\n{}", fs::read_to_string(out.join("classify").join("metrics.tsv"))?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
