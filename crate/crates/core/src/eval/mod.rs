//! Metrics, single experiments and the representation × n-gram × algorithm
//! grid over one shared train/test split.

mod metrics;
mod render;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{Algorithm, Classifier, TrainConfig, TrainedModel};
use crate::corpus::{split, Corpus, Label};
use crate::error::{Error, Result};
use crate::features::{
    FeatureConfig, Featurizer, IdfVariant, NgramConfig, Representation, SparseVector, VocabOptions,
};
use crate::preprocess::{preprocess, PreprocessConfig};

pub use metrics::{confusion, metrics, Averaging, ClassMetrics, ConfusionMatrix, Metrics};
pub use render::{render_grid, render_report};

/// N-gram settings of the grid, in table order.
pub const GRID_NGRAMS: [NgramConfig; 3] =
    [NgramConfig::UNIGRAMS, NgramConfig::BIGRAMS, NgramConfig::UNI_BI];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub representation: Representation,
    pub ngrams: NgramConfig,
    pub algorithm: Algorithm,
}

impl Cell {
    /// The 30 grid cells: representation, then n-grams, then algorithm.
    pub fn grid() -> Vec<Cell> {
        let mut cells = Vec::with_capacity(30);
        for representation in Representation::ALL {
            for ngrams in GRID_NGRAMS {
                for algorithm in Algorithm::ALL {
                    cells.push(Cell {
                        representation,
                        ngrams,
                        algorithm,
                    });
                }
            }
        }
        cells
    }
}

/// Settings shared by every cell of an experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub preprocess: PreprocessConfig,
    pub train_fraction: f64,
    pub averaging: Averaging,
    pub vocab: VocabOptions,
    pub idf: IdfVariant,
    /// Hyperparameters; `algorithm` and `seed` are overridden per cell.
    pub train: TrainConfig,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            preprocess: PreprocessConfig::default(),
            train_fraction: 0.8,
            averaging: Averaging::Macro,
            vocab: VocabOptions::default(),
            idf: IdfVariant::Smooth,
            train: TrainConfig::new(Algorithm::Mnb),
        }
    }
}

impl ExperimentOptions {
    fn feature_config(&self, representation: Representation, ngrams: NgramConfig) -> FeatureConfig {
        FeatureConfig {
            representation,
            ngrams,
            vocab: self.vocab,
            idf: self.idf,
        }
    }

    fn train_config(&self, algorithm: Algorithm, seed: u64) -> TrainConfig {
        TrainConfig {
            algorithm,
            seed,
            ..self.train
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub representation: Representation,
    pub ngrams: String,
    pub algorithm: Algorithm,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ReportConfig,
    pub n_test: usize,
    pub accuracy: f64,
    pub averaging: Averaging,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    pub fn from_predictions(config: ReportConfig, gold: &[Label], predicted: &[Label], averaging: Averaging) -> Result<Self> {
        let cm = confusion(gold, predicted)?;
        let m = metrics(&cm, averaging)?;
        Ok(Self {
            config,
            n_test: gold.len(),
            accuracy: m.accuracy,
            averaging: m.averaging,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            per_class: m.per_class,
            confusion: cm,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub seed: u64,
    pub train_fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub cells: Vec<EvalReport>,
}

impl GridReport {
    pub fn cell(&self, representation: Representation, ngrams: NgramConfig, algorithm: Algorithm) -> Option<&EvalReport> {
        let label = ngrams.label();
        self.cells.iter().find(|c| {
            c.config.representation == representation
                && c.config.ngrams == label
                && c.config.algorithm == algorithm
        })
    }

    /// Pretty-printed JSON; field order is fixed by the struct layout.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Preprocessed halves of one split.
struct Prepared {
    train_tokens: Vec<Vec<String>>,
    train_labels: Vec<Label>,
    test_tokens: Vec<Vec<String>>,
    test_labels: Vec<Label>,
}

fn prepare(corpus: &Corpus, seed: u64, options: &ExperimentOptions) -> Result<Prepared> {
    options.preprocess.validate()?;
    let (train, test) = split(corpus, options.train_fraction, seed)?;
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if test.is_empty() {
        return Err(Error::InvalidConfig("split left no test documents".into()));
    }
    let tokens = |c: &Corpus| -> Vec<Vec<String>> {
        c.documents
            .par_iter()
            .map(|d| preprocess(&d.text, &options.preprocess))
            .collect()
    };
    let prepared = Prepared {
        train_tokens: tokens(&train),
        train_labels: train.labels()?,
        test_tokens: tokens(&test),
        test_labels: test.labels()?,
    };
    let mut present = prepared.train_labels.clone();
    present.sort_unstable();
    present.dedup();
    if present.len() == 1 {
        log::warn!(
            "corpus holds only class '{}'; every metric is trivial",
            present[0]
        );
    }
    Ok(prepared)
}

struct Featurized {
    dim: usize,
    train: Vec<SparseVector>,
    test: Vec<SparseVector>,
}

fn featurize(data: &Prepared, config: FeatureConfig) -> Result<Featurized> {
    let featurizer = Featurizer::fit(&data.train_tokens, config)?;
    let apply = |docs: &[Vec<String>]| -> Vec<SparseVector> {
        docs.par_iter().map(|t| featurizer.transform(t)).collect()
    };
    Ok(Featurized {
        dim: featurizer.dim(),
        train: apply(&data.train_tokens),
        test: apply(&data.test_tokens),
    })
}

fn evaluate_cell(
    data: &Prepared,
    features: &Featurized,
    cell: Cell,
    seed: u64,
    options: &ExperimentOptions,
) -> Result<EvalReport> {
    let config = options.train_config(cell.algorithm, seed);
    let classifier = Classifier::train(&features.train, &data.train_labels, features.dim, &config)?;
    let predicted = features
        .test
        .iter()
        .map(|x| classifier.predict(x).map(|p| p.label))
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_predictions(
        ReportConfig {
            representation: cell.representation,
            ngrams: cell.ngrams.label(),
            algorithm: cell.algorithm,
            seed,
        },
        &data.test_labels,
        &predicted,
        options.averaging,
    )
}

/// Splits, fits vocabulary and idf on the training half only, trains and
/// scores the test half.
pub fn run_experiment(corpus: &Corpus, cell: Cell, seed: u64, options: &ExperimentOptions) -> Result<EvalReport> {
    let data = prepare(corpus, seed, options)?;
    let features = featurize(&data, options.feature_config(cell.representation, cell.ngrams))?;
    evaluate_cell(&data, &features, cell, seed, options)
}

/// All 30 cells over one split. Cells run in parallel; the report order is
/// always [`Cell::grid`] order.
pub fn run_grid(corpus: &Corpus, seed: u64, options: &ExperimentOptions) -> Result<GridReport> {
    let data = prepare(corpus, seed, options)?;
    let settings: Vec<(Representation, NgramConfig)> = Representation::ALL
        .iter()
        .flat_map(|&r| GRID_NGRAMS.iter().map(move |&n| (r, n)))
        .collect();
    let featurized = settings
        .par_iter()
        .map(|&(r, n)| featurize(&data, options.feature_config(r, n)))
        .collect::<Result<Vec<_>>>()?;
    let cells = Cell::grid();
    let reports = cells
        .par_iter()
        .enumerate()
        .map(|(i, &cell)| {
            let features = &featurized[i / Algorithm::ALL.len()];
            let report = evaluate_cell(&data, features, cell, seed, options);
            log::info!(
                "cell {}/{} {} {} {} done",
                i + 1,
                cells.len(),
                cell.representation,
                cell.ngrams.label(),
                cell.algorithm
            );
            report
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridReport {
        seed,
        train_fraction: options.train_fraction,
        n_train: data.train_labels.len(),
        n_test: data.test_labels.len(),
        cells: reports,
    })
}

/// Scores a trained model on a labeled corpus.
pub fn evaluate_model(model: &TrainedModel, corpus: &Corpus, averaging: Averaging) -> Result<EvalReport> {
    let gold = corpus.labels()?;
    let predicted: Vec<Label> = corpus
        .documents
        .par_iter()
        .map(|d| model.predict_text(&d.text).label)
        .collect();
    EvalReport::from_predictions(
        ReportConfig {
            representation: model.features.config.representation,
            ngrams: model.features.config.ngrams.label(),
            algorithm: model.train_config.algorithm,
            seed: model.train_config.seed,
        },
        &gold,
        &predicted,
        averaging,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    #[test]
    fn grid_has_thirty_cells_in_table_order() {
        let cells = Cell::grid();
        assert_eq!(cells.len(), 30);
        assert_eq!(cells[0].representation, Representation::Count);
        assert_eq!(cells[0].ngrams, NgramConfig::UNIGRAMS);
        assert_eq!(cells[0].algorithm, Algorithm::Mnb);
        assert_eq!(cells[5].ngrams, NgramConfig::BIGRAMS);
        assert_eq!(cells[14].ngrams, NgramConfig::UNI_BI);
        assert_eq!(cells[14].algorithm, Algorithm::Rf);
        assert_eq!(cells[15].representation, Representation::Tfidf);
    }

    #[test]
    fn single_class_corpus_scores_perfectly() {
        let docs = (0..10)
            .map(|i| Document::new(format!("d{i}"), format!("كتاب مدرسه{i} قلم"), Some(Label::Medium)))
            .collect();
        let cell = Cell {
            representation: Representation::Count,
            ngrams: NgramConfig::UNIGRAMS,
            algorithm: Algorithm::Svm,
        };
        let r = run_experiment(&Corpus::new(docs), cell, 1, &ExperimentOptions::default()).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.n_test, 2);
    }
}
