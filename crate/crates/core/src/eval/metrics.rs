use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Rows are gold labels, columns predicted labels, both in canonical order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; Label::COUNT]; Label::COUNT],
}

impl ConfusionMatrix {
    pub fn get(&self, gold: Label, predicted: Label) -> u64 {
        self.counts[gold.index()][predicted.index()]
    }

    pub fn add(&mut self, gold: Label, predicted: Label) {
        self.counts[gold.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..Label::COUNT).map(|i| self.counts[i][i]).sum()
    }

    /// Gold support of `label`.
    pub fn row_sum(&self, label: Label) -> u64 {
        self.counts[label.index()].iter().sum()
    }

    /// Number of times `label` was predicted.
    pub fn col_sum(&self, label: Label) -> u64 {
        self.counts.iter().map(|row| row[label.index()]).sum()
    }
}

pub fn confusion(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(Error::InvalidConfig("cannot score an empty prediction set".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&g, &p) in y_true.iter().zip(y_pred) {
        cm.add(g, p);
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Unweighted mean over classes with nonzero gold support.
    Macro,
    /// Support-weighted mean.
    Weighted,
}

impl Averaging {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Macro => "macro",
            Self::Weighted => "weighted",
        }
    }
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Self::Macro),
            "weighted" => Ok(Self::Weighted),
            other => Err(Error::InvalidConfig(format!("unknown averaging '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: Label,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub averaging: Averaging,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// All four labels in canonical order, including unsupported ones.
    pub per_class: Vec<ClassMetrics>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Accuracy plus per-class and averaged precision, recall and F1. A class
/// that is never predicted gets precision 0; if it has gold support a
/// warning is logged.
pub fn metrics(cm: &ConfusionMatrix, averaging: Averaging) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidConfig("confusion matrix is empty".into()));
    }
    let per_class: Vec<ClassMetrics> = Label::ALL
        .iter()
        .map(|&label| {
            let tp = cm.get(label, label);
            let support = cm.row_sum(label);
            let predicted = cm.col_sum(label);
            if predicted == 0 && support > 0 {
                log::warn!("class '{label}' is never predicted; its precision is set to 0");
            }
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            ClassMetrics {
                label,
                precision,
                recall,
                f1: harmonic(precision, recall),
                support,
            }
        })
        .collect();

    let supported: Vec<&ClassMetrics> = per_class.iter().filter(|c| c.support > 0).collect();
    let weight = |c: &ClassMetrics| match averaging {
        Averaging::Macro => 1.0 / supported.len() as f64,
        Averaging::Weighted => c.support as f64 / total as f64,
    };
    let average = |f: fn(&ClassMetrics) -> f64| supported.iter().map(|c| weight(c) * f(c)).sum();

    Ok(Metrics {
        accuracy: cm.trace() as f64 / total as f64,
        averaging,
        precision: average(|c| c.precision),
        recall: average(|c| c.recall),
        f1: average(|c| c.f1),
        per_class,
    })
}
