//! Multinomial and Bernoulli naive Bayes with additive (Laplace) smoothing.

use serde::{Deserialize, Serialize};

use super::{check_training_input, floats, present_classes};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::SparseVector;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "smoothing alpha must be >= 0, got {alpha}"
        )));
    }
    Ok(())
}

fn ln_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        f64::NEG_INFINITY
    } else {
        (num / den).ln()
    }
}

/// Log class priors `ln(n_c / N)` over the classes present in `y`.
fn log_priors(classes: &[Label], y: &[Label]) -> Vec<f64> {
    let n = y.len() as f64;
    classes
        .iter()
        .map(|c| (y.iter().filter(|l| *l == c).count() as f64 / n).ln())
        .collect()
}

/// Subtracts log-sum-exp so that `exp(scores)` sums to one. Left untouched
/// when every class has probability zero.
pub(crate) fn normalize_log(joint: &mut [f64]) {
    let max = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return;
    }
    let lse = max + joint.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    for s in joint {
        *s -= lse;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialNb {
    pub alpha: f64,
    pub classes: Vec<Label>,
    #[serde(with = "floats::vec")]
    pub log_prior: Vec<f64>,
    /// `ln P(term | class)`, one row per class.
    #[serde(with = "floats::matrix")]
    pub feature_log_prob: Vec<Vec<f64>>,
}

impl MultinomialNb {
    /// Weights are used as (possibly fractional) counts, so TF-IDF input works
    /// as well as raw counts.
    pub fn fit(x: &[SparseVector], y: &[Label], dim: usize, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_training_input(x, y, dim)?;
        let classes = present_classes(y);
        let mut counts = vec![vec![0.0; dim]; classes.len()];
        for (row, label) in x.iter().zip(y) {
            let k = classes.binary_search(label).expect("class present");
            for (i, v) in row.iter() {
                counts[k][i] += v;
            }
        }
        let feature_log_prob = counts
            .iter()
            .map(|c| {
                let den = c.iter().sum::<f64>() + alpha * dim as f64;
                c.iter().map(|&n| ln_ratio(n + alpha, den)).collect()
            })
            .collect();
        Ok(Self {
            alpha,
            log_prior: log_priors(&classes, y),
            classes,
            feature_log_prob,
        })
    }

    pub fn dim(&self) -> usize {
        self.feature_log_prob.first().map_or(0, Vec::len)
    }

    /// Normalized log posteriors, one per class.
    pub fn log_posterior(&self, x: &SparseVector) -> Vec<f64> {
        let mut joint: Vec<f64> = self
            .log_prior
            .iter()
            .zip(&self.feature_log_prob)
            .map(|(prior, flp)| prior + x.iter().map(|(i, v)| v * flp[i]).sum::<f64>())
            .collect();
        normalize_log(&mut joint);
        joint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliNb {
    pub alpha: f64,
    pub classes: Vec<Label>,
    #[serde(with = "floats::vec")]
    pub log_prior: Vec<f64>,
    /// `ln P(term present | class)`.
    #[serde(with = "floats::matrix")]
    pub log_present: Vec<Vec<f64>>,
    /// `ln P(term absent | class)`.
    #[serde(with = "floats::matrix")]
    pub log_absent: Vec<Vec<f64>>,
}

impl BernoulliNb {
    /// Any positive weight counts as presence.
    pub fn fit(x: &[SparseVector], y: &[Label], dim: usize, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_training_input(x, y, dim)?;
        let classes = present_classes(y);
        let mut docs_with = vec![vec![0.0; dim]; classes.len()];
        let mut class_docs = vec![0.0; classes.len()];
        for (row, label) in x.iter().zip(y) {
            let k = classes.binary_search(label).expect("class present");
            class_docs[k] += 1.0;
            for (i, v) in row.iter() {
                if v > 0.0 {
                    docs_with[k][i] += 1.0;
                }
            }
        }
        let mut log_present = Vec::with_capacity(classes.len());
        let mut log_absent = Vec::with_capacity(classes.len());
        for (with, n_c) in docs_with.iter().zip(&class_docs) {
            let den = n_c + 2.0 * alpha;
            log_present.push(with.iter().map(|&d| ln_ratio(d + alpha, den)).collect());
            log_absent.push(with.iter().map(|&d| ln_ratio(n_c - d + alpha, den)).collect());
        }
        Ok(Self {
            alpha,
            log_prior: log_priors(&classes, y),
            classes,
            log_present,
            log_absent,
        })
    }

    pub fn dim(&self) -> usize {
        self.log_present.first().map_or(0, Vec::len)
    }

    /// Normalized log posteriors. Every vocabulary term contributes, present
    /// or absent.
    pub fn log_posterior(&self, x: &SparseVector) -> Vec<f64> {
        let present: Vec<usize> = x.iter().filter(|(_, v)| *v > 0.0).map(|(i, _)| i).collect();
        let mut joint: Vec<f64> = (0..self.classes.len())
            .map(|k| {
                let (lp, la) = (&self.log_present[k], &self.log_absent[k]);
                let mut s = self.log_prior[k];
                let mut next = present.iter().peekable();
                for t in 0..lp.len() {
                    if next.peek() == Some(&&t) {
                        next.next();
                        s += lp[t];
                    } else {
                        s += la[t];
                    }
                }
                s
            })
            .collect();
        normalize_log(&mut joint);
        joint
    }
}
