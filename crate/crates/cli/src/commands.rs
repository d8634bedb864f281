use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::json;

use qiraa_core::classify::{Penalty, SvmLoss};
use qiraa_core::corpus::{corpus_stats, TokenCount};
use qiraa_core::eval::{self, Averaging, ExperimentOptions};
use qiraa_core::features::{FeatureConfig, IdfVariant, VocabOptions};
use qiraa_core::preprocess::{read_list_file, Stages};
use qiraa_core::synth::{self, GenConfig};
use qiraa_core::{Algorithm, Corpus, NgramConfig, PreprocessConfig, Representation, TrainConfig, TrainedModel};

use crate::args::*;
use crate::UsageError;

fn echo(config: serde_json::Value) {
    eprintln!("config: {config}");
}

fn preprocess_config(args: &PreprocessArgs) -> Result<PreprocessConfig> {
    let mut builder = PreprocessConfig::builder()
        .min_stem_length(args.min_stem_length)
        .fold_taa_marbuta(args.fold_taa_marbuta)
        .stages(Stages {
            filter: !args.no_filter,
            normalize: !args.no_normalize,
            stopwords: !args.no_stopwords,
            stem: !args.no_stem,
        });
    if let Some(path) = &args.stopwords {
        builder = builder.stopwords(read_list_file(path)?);
    }
    if let Some(path) = &args.prefixes {
        builder = builder.prefixes(read_list_file(path)?);
    }
    if let Some(path) = &args.suffixes {
        builder = builder.suffixes(read_list_file(path)?);
    }
    let config = builder.build();
    config.validate()?;
    Ok(config)
}

fn preprocess_echo(c: &PreprocessConfig) -> serde_json::Value {
    json!({
        "stopwords": c.stopwords.len(),
        "stopwords_sha256": c.stopwords_hash(),
        "prefixes": c.prefixes,
        "suffixes": c.suffixes,
        "affixes_sha256": c.affixes_hash(),
        "min_stem_length": c.min_stem_length,
        "fold_taa_marbuta": c.fold_taa_marbuta,
        "stages": {
            "filter": c.stages.filter,
            "normalize": c.stages.normalize,
            "stopwords": c.stages.stopwords,
            "stem": c.stages.stem,
        },
    })
}

fn algorithm(a: AlgoArg) -> Algorithm {
    match a {
        AlgoArg::Mnb => Algorithm::Mnb,
        AlgoArg::Bnb => Algorithm::Bnb,
        AlgoArg::Logreg => Algorithm::Logreg,
        AlgoArg::Svm => Algorithm::Svm,
        AlgoArg::Rf => Algorithm::Rf,
    }
}

fn averaging(a: AveragingArg) -> Averaging {
    match a {
        AveragingArg::Macro => Averaging::Macro,
        AveragingArg::Weighted => Averaging::Weighted,
    }
}

fn train_config(algo: Algorithm, h: &HyperArgs, seed: u64) -> Result<TrainConfig> {
    let config = TrainConfig {
        alpha: h.alpha,
        penalty: match h.penalty {
            PenaltyArg::L1 => Penalty::L1,
            PenaltyArg::L2 => Penalty::L2,
        },
        c: h.c,
        max_iter: h.max_iter,
        tol: h.tol,
        svm_loss: match h.svm_loss {
            SvmLossArg::Hinge => SvmLoss::Hinge,
            SvmLossArg::SquaredHinge => SvmLoss::SquaredHinge,
        },
        n_trees: h.n_trees,
        max_depth: h.max_depth,
        seed,
        ..TrainConfig::new(algo)
    };
    config.validate()?;
    Ok(config)
}

fn vocab_options(f: &FeatureArgs) -> Result<VocabOptions> {
    if f.min_df == 0 {
        return Err(UsageError("--min-df must be >= 1".into()).into());
    }
    if f.max_features == Some(0) {
        return Err(UsageError("--max-features must be >= 1".into()).into());
    }
    Ok(VocabOptions {
        min_df: f.min_df,
        max_features: f.max_features,
    })
}

fn idf_variant(f: &FeatureArgs) -> IdfVariant {
    match f.idf {
        IdfArg::Smooth => IdfVariant::Smooth,
        IdfArg::Plain => IdfVariant::Plain,
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Ok(Corpus::load(path)?)
}

pub fn stats(args: StatsArgs) -> Result<()> {
    let config = preprocess_config(&args.preprocess)?;
    echo(json!({
        "command": "stats",
        "corpus": args.corpus,
        "tokens": if args.raw_tokens { "raw" } else { "processed" },
        "preprocess": preprocess_echo(&config),
    }));
    let corpus = load_corpus(&args.corpus)?;
    let counting = if args.raw_tokens {
        TokenCount::Raw
    } else {
        TokenCount::Processed
    };
    let stats = corpus_stats(&corpus, &config, counting)?;
    print!("{}", stats.render());
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<()> {
    let preprocess = preprocess_config(&args.preprocess)?;
    let ngrams = NgramConfig::parse(&args.ngrams)?;
    let representation = match args.rep {
        RepArg::Count => Representation::Count,
        RepArg::Tfidf => Representation::Tfidf,
    };
    let features = FeatureConfig {
        representation,
        ngrams,
        vocab: vocab_options(&args.features)?,
        idf: idf_variant(&args.features),
    };
    let train = train_config(algorithm(args.algo), &args.hyper, args.seed)?;
    echo(json!({
        "command": "train",
        "corpus": args.corpus,
        "out": args.out,
        "train": train,
        "features": features,
        "preprocess": preprocess_echo(&preprocess),
    }));
    let corpus = load_corpus(&args.corpus)?;
    let model = TrainedModel::train(&corpus, preprocess, features, train)?;
    model.save(&args.out)?;
    let classes: Vec<&str> = model.classifier.classes().iter().map(|l| l.as_str()).collect();
    println!(
        "trained {} on {} documents ({} {}, {} features, classes {}) -> {}",
        train.algorithm,
        corpus.len(),
        representation,
        ngrams.label(),
        model.dim(),
        classes.join(","),
        args.out.display()
    );
    Ok(())
}

fn format_scores(p: &qiraa_core::Prediction) -> String {
    p.scores
        .iter()
        .map(|s| format!("\t{}={}", s.label, s.score))
        .collect()
}

pub fn predict(args: PredictArgs) -> Result<()> {
    echo(json!({
        "command": "predict",
        "model": args.model,
        "input": args.input.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into()),
        "scores": args.scores,
        "jsonl": args.jsonl,
    }));
    let model = TrainedModel::load(&args.model)?;
    let reader: Box<dyn BufRead> = match &args.input {
        Some(path) => Box::new(BufReader::new(
            fs::File::open(path).map_err(|e| qiraa_core::Error::Io {
                path: path.clone(),
                source: e,
            })?,
        )),
        None => Box::new(BufReader::new(io::stdin())),
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    if args.jsonl {
        let corpus = Corpus::from_reader(reader)?;
        for doc in &corpus.documents {
            let p = model.predict_text(&doc.text);
            write!(out, "{}\t{}", doc.id, p.label)?;
            if args.scores {
                write!(out, "{}", format_scores(&p))?;
            }
            writeln!(out)?;
        }
    } else {
        let mut text = String::new();
        let mut reader = reader;
        reader
            .read_to_string(&mut text)
            .context("input is not valid UTF-8")
            .map_err(|e| DataError(format!("{e:#}")))?;
        for line in text.lines() {
            let p = model.predict_text(line);
            write!(out, "{}", p.label)?;
            if args.scores {
                write!(out, "{}", format_scores(&p))?;
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Input that could not be read as data (distinct from usage mistakes).
#[derive(Debug)]
pub struct DataError(pub String);

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DataError {}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    echo(json!({
        "command": "evaluate",
        "model": args.model,
        "corpus": args.corpus,
        "averaging": averaging(args.averaging),
    }));
    let model = TrainedModel::load(&args.model)?;
    let corpus = load_corpus(&args.corpus)?;
    let report = eval::evaluate_model(&model, &corpus, averaging(args.averaging))?;
    match args.format {
        FormatArg::Table => print!("{}", eval::render_report(&report)),
        FormatArg::Json => println!("{}", report.to_json()?),
    }
    Ok(())
}

pub fn grid(args: GridArgs) -> Result<()> {
    let preprocess = preprocess_config(&args.preprocess)?;
    if !(args.train_fraction > 0.0 && args.train_fraction < 1.0) {
        return Err(UsageError(format!(
            "--train-fraction must be in (0, 1), got {}",
            args.train_fraction
        ))
        .into());
    }
    let options = ExperimentOptions {
        train_fraction: args.train_fraction,
        averaging: averaging(args.averaging),
        vocab: vocab_options(&args.features)?,
        idf: idf_variant(&args.features),
        train: train_config(Algorithm::Mnb, &args.hyper, args.seed)?,
        preprocess,
    };
    let mut hyper = serde_json::to_value(options.train)?;
    if let Some(obj) = hyper.as_object_mut() {
        obj.remove("algorithm");
    }
    echo(json!({
        "command": "grid",
        "corpus": args.corpus,
        "seed": args.seed,
        "train_fraction": options.train_fraction,
        "averaging": options.averaging,
        "vocab": options.vocab,
        "idf": options.idf,
        "hyperparameters": hyper,
        "preprocess": preprocess_echo(&options.preprocess),
    }));
    let corpus = load_corpus(&args.corpus)?;
    let report = eval::run_grid(&corpus, args.seed, &options)?;
    let json = report.to_json()?;
    if let Some(path) = &args.json_out {
        fs::write(path, format!("{json}\n")).map_err(|e| qiraa_core::Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    match args.format {
        FormatArg::Table => print!("{}", eval::render_grid(&report)),
        FormatArg::Json => println!("{json}"),
    }
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let (lo, hi) = args
        .doc_length
        .split_once('-')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| UsageError(format!("invalid --doc-length '{}', expected MIN-MAX", args.doc_length)))?;
    let four = |flag: &str, v: &[usize]| -> Result<[usize; 4]> {
        v.try_into()
            .map_err(|_| UsageError(format!("{flag} needs four comma-separated values, got {}", v.len())).into())
    };
    let config = GenConfig {
        docs_per_class: four("--docs-per-class", &args.docs_per_class)?,
        doc_length: (lo, hi),
        vocab_size: four("--vocab-size", &args.vocab_size)?,
        overlap: args.overlap,
        seed: args.seed,
    };
    config.validate()?;
    echo(json!({
        "command": "synth",
        "out": args.out.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into()),
        "synth": config,
    }));
    let corpus = synth::generate(&config)?;
    match &args.out {
        Some(path) => corpus.save(path)?,
        None => {
            let stdout = io::stdout();
            let mut out = io::BufWriter::new(stdout.lock());
            corpus.write_jsonl(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
