//! The five classifiers and the model container that bundles them with the
//! preprocessing and featurization needed to reproduce their input space.

mod floats;
pub mod forest;
pub mod linear;
mod model;
pub mod naive_bayes;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::SparseVector;

pub use forest::RandomForest;
pub use linear::LinearModel;
pub use model::{TrainedModel, FORMAT_VERSION};
pub use naive_bayes::{BernoulliNb, MultinomialNb};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Mnb,
    Bnb,
    Logreg,
    Svm,
    Rf,
}

impl Algorithm {
    /// Row order of the result tables.
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Mnb,
        Algorithm::Bnb,
        Algorithm::Logreg,
        Algorithm::Svm,
        Algorithm::Rf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mnb => "mnb",
            Self::Bnb => "bnb",
            Self::Logreg => "logreg",
            Self::Svm => "svm",
            Self::Rf => "rf",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Self::Mnb => "Multinomial Naive Bayes",
            Self::Bnb => "Bernoulli Naive Bayes",
            Self::Logreg => "Logistic Regression",
            Self::Svm => "Support Vector Machine",
            Self::Rf => "Random Forest",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    L1,
    L2,
}

impl FromStr for Penalty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Self::L1),
            "l2" => Ok(Self::L2),
            other => Err(Error::InvalidConfig(format!("unknown penalty '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvmLoss {
    Hinge,
    SquaredHinge,
}

impl FromStr for SvmLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hinge" => Ok(Self::Hinge),
            "squared-hinge" | "squared_hinge" => Ok(Self::SquaredHinge),
            other => Err(Error::InvalidConfig(format!("unknown svm loss '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    /// Additive smoothing for the naive Bayes models.
    pub alpha: f64,
    pub penalty: Penalty,
    /// Inverse regularization strength.
    pub c: f64,
    /// `None` means 1000 for logistic regression and 1500 for the SVM.
    pub max_iter: Option<usize>,
    pub tol: f64,
    pub svm_loss: SvmLoss,
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            alpha: 1.0,
            penalty: Penalty::L2,
            c: 1.0,
            max_iter: None,
            tol: 1e-4,
            svm_loss: SvmLoss::Hinge,
            n_trees: 100,
            max_depth: None,
            seed: 42,
        }
    }

    pub fn effective_max_iter(&self) -> usize {
        self.max_iter.unwrap_or(match self.algorithm {
            Algorithm::Svm => 1500,
            _ => 1000,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.c > 0.0) {
            return bad(format!("C must be > 0, got {}", self.c));
        }
        if !(self.alpha >= 0.0) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if self.max_iter == Some(0) {
            return bad("max_iter must be >= 1".into());
        }
        if !(self.tol >= 0.0) {
            return bad(format!("tol must be >= 0, got {}", self.tol));
        }
        if self.n_trees == 0 {
            return bad("n_trees must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub label: Label,
    pub score: f64,
}

/// Predicted label and the per-class scores it was chosen from: normalized
/// log-probabilities (naive Bayes, logistic regression), decision margins
/// (SVM) or vote fractions (random forest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub scores: Vec<ClassScore>,
}

impl Prediction {
    fn from_scores(classes: &[Label], scores: Vec<f64>) -> Self {
        let pairs: Vec<(Label, f64)> = classes.iter().copied().zip(scores).collect();
        Self {
            label: argmax_canonical(&pairs),
            scores: pairs
                .into_iter()
                .map(|(label, score)| ClassScore { label, score })
                .collect(),
        }
    }
}

/// Scores closer than this (relative) count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

fn beats(candidate: f64, best: f64) -> bool {
    if candidate.is_nan() {
        return false;
    }
    if best == f64::NEG_INFINITY || best.is_nan() {
        return candidate > best || best.is_nan();
    }
    let scale = 1.0f64.max(candidate.abs()).max(best.abs());
    candidate - best > TIE_TOLERANCE * scale
}

/// Highest-scoring label; ties (within floating-point tolerance) go to the
/// label that comes first in canonical order. `scores` must be non-empty.
pub fn argmax_canonical(scores: &[(Label, f64)]) -> Label {
    let mut sorted: Vec<(Label, f64)> = scores.to_vec();
    sorted.sort_by_key(|s| s.0);
    let mut best = sorted[0];
    for &s in &sorted[1..] {
        if beats(s.1, best.1) {
            best = s;
        }
    }
    best.0
}

/// Sorted, de-duplicated labels of `y`.
pub(crate) fn present_classes(y: &[Label]) -> Vec<Label> {
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    classes
}

pub(crate) fn check_training_input(x: &[SparseVector], y: &[Label], dim: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if let Some(row) = x.iter().find(|r| r.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: row.dim(),
        });
    }
    Ok(())
}

/// Trained parameters of one of the five algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classifier {
    Mnb(MultinomialNb),
    Bnb(BernoulliNb),
    Linear(LinearModel),
    Forest(RandomForest),
}

impl Classifier {
    /// Trains the configured algorithm. Linear models given a single class
    /// degrade to a constant predictor with a warning instead of failing.
    pub fn train(x: &[SparseVector], y: &[Label], dim: usize, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        check_training_input(x, y, dim)?;
        Ok(match config.algorithm {
            Algorithm::Mnb => Self::Mnb(MultinomialNb::fit(x, y, dim, config.alpha)?),
            Algorithm::Bnb => Self::Bnb(BernoulliNb::fit(x, y, dim, config.alpha)?),
            Algorithm::Logreg | Algorithm::Svm => {
                let classes = present_classes(y);
                if classes.len() == 1 {
                    log::warn!(
                        "training data holds only class '{}'; {} degenerates to a constant predictor",
                        classes[0],
                        config.algorithm
                    );
                    Self::Linear(LinearModel::constant(config.algorithm, classes[0], dim))
                } else {
                    Self::Linear(LinearModel::fit(x, y, dim, config)?)
                }
            }
            Algorithm::Rf => Self::Forest(RandomForest::fit(
                x,
                y,
                dim,
                config.n_trees,
                config.max_depth,
                config.seed,
            )?),
        })
    }

    pub fn classes(&self) -> &[Label] {
        match self {
            Self::Mnb(m) => &m.classes,
            Self::Bnb(m) => &m.classes,
            Self::Linear(m) => &m.classes,
            Self::Forest(m) => &m.classes,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Mnb(m) => m.dim(),
            Self::Bnb(m) => m.dim(),
            Self::Linear(m) => m.dim(),
            Self::Forest(m) => m.dim,
        }
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let scores = match self {
            Self::Mnb(m) => m.log_posterior(x),
            Self::Bnb(m) => m.log_posterior(x),
            Self::Linear(m) => m.scores(x),
            Self::Forest(m) => m.vote_fractions(x),
        };
        Ok(Prediction::from_scores(self.classes(), scores))
    }

    /// Structural consistency of deserialized parameters.
    pub(crate) fn validate(&self) -> Result<()> {
        let corrupt = |m: &str| Err(Error::CorruptModel(m.to_owned()));
        let classes = self.classes();
        if classes.is_empty() || classes.windows(2).any(|w| w[0] >= w[1]) {
            return corrupt("class list empty or not in canonical order");
        }
        let k = classes.len();
        let dim = self.dim();
        let rows_ok = |m: &[Vec<f64>]| m.len() == k && m.iter().all(|r| r.len() == dim);
        let ok = match self {
            Self::Mnb(m) => m.log_prior.len() == k && rows_ok(&m.feature_log_prob),
            Self::Bnb(m) => {
                m.log_prior.len() == k && rows_ok(&m.log_present) && rows_ok(&m.log_absent)
            }
            Self::Linear(m) => m.bias.len() == k && rows_ok(&m.weights),
            Self::Forest(m) => m.trees.iter().all(|t| {
                !t.nodes.is_empty()
                    && t.nodes.iter().all(|n| match n {
                        forest::Node::Leaf { counts } => counts.len() == k,
                        forest::Node::Split {
                            feature,
                            left,
                            right,
                            ..
                        } => {
                            (*feature as usize) < dim
                                && (*left as usize) < t.nodes.len()
                                && (*right as usize) < t.nodes.len()
                        }
                    })
            }),
        };
        if ok {
            Ok(())
        } else {
            corrupt("parameter shapes do not match class count or vocabulary size")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    fn v(dense: &[f64]) -> SparseVector {
        SparseVector::from_dense(dense)
    }

    #[test]
    fn argmax_breaks_ties_canonically() {
        assert_eq!(argmax_canonical(&[(Medium, 1.0), (Easy, 1.0)]), Easy);
        assert_eq!(argmax_canonical(&[(Difficult, 0.5), (VeryDifficult, 0.5)]), Difficult);
        assert_eq!(argmax_canonical(&[(Easy, 0.2), (Medium, 0.7)]), Medium);
        assert_eq!(argmax_canonical(&[(Easy, 1.0), (Medium, 1.0 + 1e-15)]), Easy);
        assert_eq!(
            argmax_canonical(&[(Easy, f64::NEG_INFINITY), (Medium, -3.0)]),
            Medium
        );
        assert_eq!(
            argmax_canonical(&[(Easy, f64::NEG_INFINITY), (Medium, f64::NEG_INFINITY)]),
            Easy
        );
    }

    #[test]
    fn exact_tie_in_every_model_goes_to_lowest_label() {
        // two mirror-image classes; the query is symmetric
        let x = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let y = vec![Medium, Difficult];
        let query = v(&[1.0, 1.0]);
        for algo in [Algorithm::Mnb, Algorithm::Bnb] {
            let m = Classifier::train(&x, &y, 2, &TrainConfig::new(algo)).unwrap();
            let p = m.predict(&query).unwrap();
            assert_eq!(p.scores[0].score, p.scores[1].score, "{algo}");
            assert_eq!(p.label, Medium, "{algo}");
        }
    }

    #[test]
    fn mnb_toy_prediction() {
        let x = vec![v(&[2.0, 1.0, 0.0]), v(&[0.0, 2.0, 1.0])];
        let m = Classifier::train(&x, &[Easy, Medium], 3, &TrainConfig::new(Algorithm::Mnb)).unwrap();
        assert_eq!(m.predict(&v(&[1.0, 0.0, 0.0])).unwrap().label, Easy);
    }

    #[test]
    fn empty_vector_uses_majority_prior() {
        let x = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, 1.0])];
        let m = Classifier::train(&x, &[Easy, Medium, Medium], 2, &TrainConfig::new(Algorithm::Mnb)).unwrap();
        assert_eq!(m.predict(&SparseVector::empty(2)).unwrap().label, Medium);
    }

    #[test]
    fn single_class_training_predicts_that_class() {
        let x = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        for algo in Algorithm::ALL {
            let m = Classifier::train(&x, &[Difficult, Difficult], 2, &TrainConfig::new(algo)).unwrap();
            assert_eq!(m.classes(), &[Difficult]);
            assert_eq!(m.predict(&v(&[3.0, 1.0])).unwrap().label, Difficult, "{algo}");
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let x = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let m = Classifier::train(&x, &[Easy, Medium], 2, &TrainConfig::new(Algorithm::Mnb)).unwrap();
        assert!(matches!(
            m.predict(&SparseVector::empty(3)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn config_validation() {
        let mut c = TrainConfig::new(Algorithm::Svm);
        assert_eq!(c.effective_max_iter(), 1500);
        assert_eq!(TrainConfig::new(Algorithm::Logreg).effective_max_iter(), 1000);
        c.c = 0.0;
        assert!(c.validate().is_err());
        let mut c = TrainConfig::new(Algorithm::Mnb);
        c.alpha = -1.0;
        assert!(c.validate().is_err());
        let mut c = TrainConfig::new(Algorithm::Logreg);
        c.max_iter = Some(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("knn".parse::<Algorithm>().is_err());
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let x = vec![v(&[1.0])];
        assert!(matches!(
            Classifier::train(&x, &[Easy, Easy], 1, &TrainConfig::new(Algorithm::Mnb)),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert!(matches!(
            Classifier::train(&[], &[], 1, &TrainConfig::new(Algorithm::Rf)),
            Err(Error::EmptyTrainingSet)
        ));
    }
}
