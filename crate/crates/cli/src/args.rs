use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qiraa",
    version,
    about = "Arabic text readability classification (Easy / Medium / Difficult / Very difficult)"
)]
pub struct Cli {
    /// More log output on stderr (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Only errors on stderr
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-level document and token counts
    Stats(StatsArgs),
    /// Train a model on a labeled corpus
    Train(TrainArgs),
    /// Predict readability levels with a trained model
    Predict(PredictArgs),
    /// Score a trained model on a labeled corpus
    Evaluate(EvaluateArgs),
    /// Run all 30 representation x n-gram x algorithm cells on one split
    Grid(GridArgs),
    /// Write a synthetic labeled corpus
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Stop-word list, one entry per line (`#` comments allowed)
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,

    /// Prefix table, one entry per line
    #[arg(long, value_name = "FILE")]
    pub prefixes: Option<PathBuf>,

    /// Suffix table, one entry per line
    #[arg(long, value_name = "FILE")]
    pub suffixes: Option<PathBuf>,

    #[arg(long, default_value_t = 3, value_name = "N")]
    pub min_stem_length: usize,

    /// Fold taa marbuta into haa during normalization
    #[arg(long)]
    pub fold_taa_marbuta: bool,

    #[arg(long)]
    pub no_filter: bool,

    #[arg(long)]
    pub no_normalize: bool,

    #[arg(long)]
    pub no_stopwords: bool,

    #[arg(long)]
    pub no_stem: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Mnb,
    Bnb,
    Logreg,
    Svm,
    Rf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    Count,
    Tfidf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdfArg {
    Smooth,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SvmLossArg {
    Hinge,
    SquaredHinge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AveragingArg {
    Macro,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct FeatureArgs {
    /// idf variant for TF-IDF
    #[arg(long, value_enum, default_value_t = IdfArg::Smooth)]
    pub idf: IdfArg,

    /// Drop terms seen in fewer training documents
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub min_df: usize,

    /// Keep only the N most document-frequent terms
    #[arg(long, value_name = "N")]
    pub max_features: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    /// Additive smoothing for naive Bayes
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    #[arg(long, value_enum, default_value_t = PenaltyArg::L2)]
    pub penalty: PenaltyArg,

    /// Inverse regularization strength
    #[arg(long = "c", default_value_t = 1.0, value_name = "C")]
    pub c: f64,

    /// Iteration cap (default 1000 for logreg, 1500 for svm)
    #[arg(long, value_name = "N")]
    pub max_iter: Option<usize>,

    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,

    #[arg(long, value_enum, default_value_t = SvmLossArg::Hinge)]
    pub svm_loss: SvmLossArg,

    #[arg(long, default_value_t = 100, value_name = "N")]
    pub n_trees: usize,

    /// Tree depth limit (unlimited by default)
    #[arg(long, value_name = "N")]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub corpus: PathBuf,

    /// Count whitespace tokens before preprocessing
    #[arg(long)]
    pub raw_tokens: bool,

    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    pub corpus: PathBuf,

    #[arg(long, value_enum)]
    pub algo: AlgoArg,

    #[arg(long, value_enum, default_value_t = RepArg::Tfidf)]
    pub rep: RepArg,

    /// 1, 2 or 1-2
    #[arg(long, default_value = "1-2")]
    pub ngrams: String,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Model file to write
    #[arg(long, value_name = "MODEL")]
    pub out: PathBuf,

    #[command(flatten)]
    pub hyper: HyperArgs,

    #[command(flatten)]
    pub features: FeatureArgs,

    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub model: PathBuf,

    /// One document per line; standard input when absent
    pub input: Option<PathBuf>,

    /// Append per-class scores to each output line
    #[arg(long)]
    pub scores: bool,

    /// Read corpus JSONL instead of plain lines; output is `id<TAB>label`
    #[arg(long)]
    pub jsonl: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub model: PathBuf,
    pub corpus: PathBuf,

    #[arg(long, value_enum, default_value_t = AveragingArg::Macro)]
    pub averaging: AveragingArg,

    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    pub corpus: PathBuf,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,

    #[arg(long, value_enum, default_value_t = AveragingArg::Macro)]
    pub averaging: AveragingArg,

    /// What to print on standard output
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    pub format: FormatArg,

    /// Also write the JSON report here
    #[arg(long, value_name = "FILE")]
    pub json_out: Option<PathBuf>,

    #[command(flatten)]
    pub hyper: HyperArgs,

    #[command(flatten)]
    pub features: FeatureArgs,

    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Documents per level, Easy..VeryDifficult
    #[arg(long, value_delimiter = ',', default_values_t = [67, 88, 93, 149])]
    pub docs_per_class: Vec<usize>,

    /// Vocabulary size per level
    #[arg(long, value_delimiter = ',', default_values_t = [150, 200, 250, 300])]
    pub vocab_size: Vec<usize>,

    /// Inclusive token range per document, e.g. 20-60
    #[arg(long, default_value = "20-60")]
    pub doc_length: String,

    /// Fraction of vocabulary shared by adjacent levels
    #[arg(long, default_value_t = 0.0)]
    pub overlap: f64,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// JSONL file to write; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}
