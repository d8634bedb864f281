//! Deterministic synthetic corpora with per-class vocabularies.
//!
//! Each class owns `vocab_size[k]` made-up Arabic-letter words. Adjacent
//! levels (Easy/Medium, Medium/Difficult, Difficult/VeryDifficult) share a
//! pool of `round(overlap * min(v_k, v_k+1) / 2)` words; everything else is
//! private to its class, so `overlap = 0` yields pairwise disjoint
//! vocabularies. Documents draw their tokens uniformly from their class
//! vocabulary.
//!
//! Words never start with a letter that the default stemmer treats as a
//! prefix, never end with a suffix letter, and are never stop words, so they
//! pass through the default pipeline unchanged.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Label};
use crate::error::{Error, Result};
use crate::preprocess::PreprocessConfig;
use crate::rng::SplitMix64;

const LETTERS: &[char] = &[
    'ا', 'ب', 'ت', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع',
    'غ', 'ف', 'ق', 'ك', 'ل', 'م', 'ن', 'ه', 'و', 'ي',
];
const NOT_FIRST: &[char] = &['ا', 'و', 'ف', 'ب', 'ك', 'ل'];
const NOT_LAST: &[char] = &['ا', 'ن', 'ت', 'ه', 'ي'];
const WORD_LENGTH: (usize, usize) = (3, 8);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub docs_per_class: [usize; Label::COUNT],
    /// Inclusive token-count range per document.
    pub doc_length: (usize, usize),
    pub vocab_size: [usize; Label::COUNT],
    /// Fraction of vocabulary shared between adjacent levels, in `[0, 1]`.
    pub overlap: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    /// Class sizes follow the real corpus at 1/100 scale.
    fn default() -> Self {
        Self {
            docs_per_class: [67, 88, 93, 149],
            doc_length: (20, 60),
            vocab_size: [150, 200, 250, 300],
            overlap: 0.0,
            seed: 42,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.docs_per_class.contains(&0) {
            return bad("every class needs at least one document".into());
        }
        if self.vocab_size.contains(&0) {
            return bad("every class needs a vocabulary of at least one word".into());
        }
        let (lo, hi) = self.doc_length;
        if lo == 0 || lo > hi {
            return bad(format!("invalid document length range {lo}..={hi}"));
        }
        if !(0.0..=1.0).contains(&self.overlap) {
            return bad(format!("overlap must be in [0, 1], got {}", self.overlap));
        }
        Ok(())
    }

    fn shared_sizes(&self) -> [usize; Label::COUNT - 1] {
        std::array::from_fn(|k| {
            let m = self.vocab_size[k].min(self.vocab_size[k + 1]);
            (self.overlap * m as f64 / 2.0).round() as usize
        })
    }
}

fn random_word(rng: &mut SplitMix64) -> String {
    let len = rng.range_inclusive(WORD_LENGTH.0, WORD_LENGTH.1);
    let mut word = String::with_capacity(len * 2);
    for i in 0..len {
        let c = loop {
            let c = LETTERS[rng.below_usize(LETTERS.len())];
            let banned = (i == 0 && NOT_FIRST.contains(&c)) || (i == len - 1 && NOT_LAST.contains(&c));
            if !banned {
                break c;
            }
        };
        word.push(c);
    }
    word
}

struct WordSource<'a> {
    rng: SplitMix64,
    seen: HashSet<String>,
    stopwords: &'a BTreeSet<String>,
}

impl WordSource<'_> {
    fn take(&mut self, n: usize) -> Vec<String> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = random_word(&mut self.rng);
            if !self.stopwords.contains(&w) && self.seen.insert(w.clone()) {
                out.push(w);
            }
        }
        out
    }
}

/// Per-class vocabularies, in canonical label order. Shared words appear in
/// both adjacent classes.
pub fn class_vocabularies(config: &GenConfig) -> Result<[Vec<String>; Label::COUNT]> {
    config.validate()?;
    let stopwords = PreprocessConfig::default().stopwords;
    let mut source = WordSource {
        rng: SplitMix64::derive(config.seed, 0),
        seen: HashSet::new(),
        stopwords: &stopwords,
    };
    let shared_sizes = config.shared_sizes();
    let pools: Vec<Vec<String>> = shared_sizes.iter().map(|&n| source.take(n)).collect();
    Ok(std::array::from_fn(|k| {
        let left = if k > 0 { shared_sizes[k - 1] } else { 0 };
        let right = shared_sizes.get(k).copied().unwrap_or(0);
        let private = config.vocab_size[k].saturating_sub(left + right);
        let mut vocab = source.take(private);
        if k > 0 {
            vocab.extend(pools[k - 1].iter().cloned());
        }
        if let Some(pool) = pools.get(k) {
            vocab.extend(pool.iter().cloned());
        }
        vocab
    }))
}

/// Labeled corpus, classes in canonical order, ids `<label>-<n>`.
pub fn generate(config: &GenConfig) -> Result<Corpus> {
    let vocabularies = class_vocabularies(config)?;
    let (lo, hi) = config.doc_length;
    let mut documents = Vec::with_capacity(config.docs_per_class.iter().sum());
    for label in Label::ALL {
        let k = label.index();
        let vocab = &vocabularies[k];
        let mut rng = SplitMix64::derive(config.seed, 1 + k as u64);
        for i in 0..config.docs_per_class[k] {
            let len = rng.range_inclusive(lo, hi);
            let text = (0..len)
                .map(|_| vocab[rng.below_usize(vocab.len())].as_str())
                .collect::<Vec<_>>()
                .join(" ");
            documents.push(Document::new(format!("{label}-{i:05}"), text, Some(label)));
        }
    }
    Ok(Corpus::new(documents))
}
