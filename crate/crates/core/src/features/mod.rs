//! Word n-gram Count and TF-IDF vectors over a vocabulary fitted on the
//! training split only.

mod ngram;
mod sparse;
mod tfidf;
mod vocab;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ngram::{extract_ngrams, NgramConfig};
pub use sparse::SparseVector;
pub use tfidf::{IdfModel, IdfVariant};
pub use vocab::{VocabOptions, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Raw term counts.
    Count,
    /// Smoothed (or plain) idf-weighted counts, L2-normalized.
    Tfidf,
}

impl Representation {
    pub const ALL: [Representation; 2] = [Representation::Count, Representation::Tfidf];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Count => "count",
            Self::Tfidf => "tfidf",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Self::Count),
            "tfidf" => Ok(Self::Tfidf),
            other => Err(Error::InvalidConfig(format!(
                "unknown representation '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub representation: Representation,
    pub ngrams: NgramConfig,
    pub vocab: VocabOptions,
    pub idf: IdfVariant,
}

impl FeatureConfig {
    pub fn new(representation: Representation, ngrams: NgramConfig) -> Self {
        Self {
            representation,
            ngrams,
            vocab: VocabOptions::default(),
            idf: IdfVariant::Smooth,
        }
    }
}

/// Fitted token-sequence → vector mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Featurizer {
    pub config: FeatureConfig,
    pub vocabulary: Vocabulary,
    pub idf: Option<IdfModel>,
}

impl Featurizer {
    /// Fits vocabulary (and idf, for TF-IDF) on training token sequences.
    pub fn fit(train_tokens: &[Vec<String>], config: FeatureConfig) -> Result<Self> {
        let terms: Vec<Vec<String>> = train_tokens
            .iter()
            .map(|t| extract_ngrams(t, config.ngrams))
            .collect();
        let vocabulary = Vocabulary::build(&terms, config.vocab)?;
        let idf = match config.representation {
            Representation::Count => None,
            Representation::Tfidf => Some(IdfModel::fit(&vocabulary, config.idf)),
        };
        Ok(Self {
            config,
            vocabulary,
            idf,
        })
    }

    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn transform(&self, tokens: &[String]) -> SparseVector {
        let counts = self
            .vocabulary
            .count_vectorize(&extract_ngrams(tokens, self.config.ngrams));
        match &self.idf {
            Some(idf) => idf.transform(&counts),
            None => counts,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let corrupt = |m: &str| Err(Error::CorruptModel(m.to_owned()));
        match (&self.idf, self.config.representation) {
            (None, Representation::Count) => Ok(()),
            (Some(idf), Representation::Tfidf) if idf.idf.len() == self.vocabulary.len() => {
                Ok(())
            }
            (Some(_), Representation::Tfidf) => corrupt("idf table size differs from vocabulary"),
            _ => corrupt("idf table does not match representation"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn tfidf_worked_example() {
        // df(a)=2, df(b)=1 over N=2; document counts {a:2, b:1}
        let train = vec![toks("a b"), toks("a")];
        let f = Featurizer::fit(
            &train,
            FeatureConfig::new(Representation::Tfidf, NgramConfig::UNIGRAMS),
        )
        .unwrap();
        let idf = f.idf.as_ref().unwrap();
        assert_eq!(idf.idf[0], 1.0);
        assert!((idf.idf[1] - (1.5f64.ln() + 1.0)).abs() < 1e-15);
        let v = f.transform(&toks("a a b"));
        assert!((v.get(0) - 0.818_180).abs() < 1e-6);
        assert!((v.get(1) - 0.574_962).abs() < 1e-6);
    }

    #[test]
    fn oov_only_document_is_empty() {
        let f = Featurizer::fit(
            &[toks("a b")],
            FeatureConfig::new(Representation::Tfidf, NgramConfig::UNI_BI),
        )
        .unwrap();
        assert_eq!(f.dim(), 3);
        assert!(f.transform(&toks("x y")).is_empty());
    }

    proptest! {
        #[test]
        fn tfidf_rows_have_unit_norm_and_ignore_scale(
            train in prop::collection::vec(prop::collection::vec("[a-e]", 1..6), 1..6),
            doc in prop::collection::vec("[a-g]", 0..12),
        ) {
            let f = Featurizer::fit(&train, FeatureConfig::new(Representation::Tfidf, NgramConfig::UNI_BI)).unwrap();
            let v = f.transform(&doc);
            if !v.is_empty() {
                prop_assert!((v.l2_norm() - 1.0).abs() < 1e-9);
                prop_assert!(v.values().iter().all(|w| *w > 0.0));
            }
            let counts = f.vocabulary.count_vectorize(&extract_ngrams(&doc, NgramConfig::UNI_BI));
            let counts2 = counts.map_values(|_, c| 2.0 * c);
            let idf = f.idf.as_ref().unwrap();
            prop_assert_eq!(idf.transform(&counts), idf.transform(&counts2));
        }
    }
}
