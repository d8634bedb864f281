use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::SparseVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabOptions {
    /// Minimum number of training documents a term must occur in.
    pub min_df: usize,
    /// Keep only the most document-frequent terms (ties by first occurrence).
    pub max_features: Option<usize>,
}

impl Default for VocabOptions {
    fn default() -> Self {
        Self {
            min_df: 1,
            max_features: None,
        }
    }
}

/// Term ↔ index bijection with document frequencies. Indices follow first
/// occurrence over the training documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    terms: Vec<String>,
    df: Vec<u32>,
    n_docs: usize,
    index: HashMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    n_docs: usize,
    terms: Vec<String>,
    df: Vec<u32>,
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        Self {
            n_docs: v.n_docs,
            terms: v.terms,
            df: v.df,
        }
    }
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = String;

    fn try_from(r: VocabularyRepr) -> std::result::Result<Self, String> {
        if r.terms.len() != r.df.len() {
            return Err("vocabulary terms and df differ in length".into());
        }
        if r.df.iter().any(|&d| d == 0 || d as usize > r.n_docs) {
            return Err("document frequency out of range".into());
        }
        let index: HashMap<String, u32> = r
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        if index.len() != r.terms.len() {
            return Err("duplicate vocabulary term".into());
        }
        Ok(Self {
            terms: r.terms,
            df: r.df,
            n_docs: r.n_docs,
            index,
        })
    }
}

impl Vocabulary {
    /// Builds from per-document term lists of the training split.
    pub fn build(docs: &[Vec<String>], options: VocabOptions) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let mut order: Vec<&str> = Vec::new();
        let mut placed: HashSet<&str> = HashSet::new();
        let mut df: HashMap<&str, u32> = HashMap::new();
        for doc in docs {
            let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_insert(0) += 1;
            }
            for t in doc {
                if placed.insert(t.as_str()) {
                    order.push(t.as_str());
                }
            }
        }
        let min_df = options.min_df.max(1) as u32;
        let mut kept: Vec<(usize, &str, u32)> = order
            .iter()
            .enumerate()
            .map(|(pos, t)| (pos, *t, df[t]))
            .filter(|&(_, _, d)| d >= min_df)
            .collect();
        if let Some(max) = options.max_features {
            if kept.len() > max {
                kept.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
                kept.truncate(max);
                kept.sort_by_key(|k| k.0);
            }
        }
        let terms: Vec<String> = kept.iter().map(|k| k.1.to_owned()).collect();
        let df = kept.iter().map(|k| k.2).collect();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Self {
            terms,
            df,
            n_docs: docs.len(),
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).map(|&i| i as usize)
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn df(&self, index: usize) -> u32 {
        self.df[index]
    }

    pub fn df_of(&self, term: &str) -> Option<u32> {
        self.index_of(term).map(|i| self.df[i])
    }

    /// Raw occurrence counts; out-of-vocabulary terms are dropped.
    pub fn count_vectorize(&self, terms: &[String]) -> SparseVector {
        let pairs = terms
            .iter()
            .filter_map(|t| self.index.get(t.as_str()).map(|&i| (i, 1.0)))
            .collect();
        SparseVector::from_pairs(self.len(), pairs)
    }
}
