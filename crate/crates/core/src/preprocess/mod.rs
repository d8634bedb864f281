//! Text preprocessing: tokenize → filter → normalize → remove stop words →
//! light stem, always in that order.

mod stem;
mod text;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use stem::light_stem;
pub use text::{
    canonical_entry, filter_tokens, is_arabic_letter, is_diacritic, normalize, normalize_with,
    tokenize, TATWEEL,
};

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_ar.txt");

pub const DEFAULT_PREFIXES: &[&str] = &[
    "وال", "بال", "كال", "فال", "لل", "ال", "و", "ف", "ب", "ك", "ل",
];

pub const DEFAULT_SUFFIXES: &[&str] = &[
    "ها", "ان", "ات", "ون", "ين", "يه", "ية", "ه", "ة", "ي", "ا",
];

/// Per-stage switches. Tokenizing always runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stages {
    pub filter: bool,
    pub normalize: bool,
    pub stopwords: bool,
    pub stem: bool,
}

impl Default for Stages {
    fn default() -> Self {
        Self {
            filter: true,
            normalize: true,
            stopwords: true,
            stem: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    /// Stored in normalized form.
    pub stopwords: BTreeSet<String>,
    pub min_stem_length: usize,
    /// Longest first.
    pub prefixes: Vec<String>,
    /// Longest first.
    pub suffixes: Vec<String>,
    pub fold_taa_marbuta: bool,
    pub stages: Stages,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self::builder().build()
    }
}

impl PreprocessConfig {
    pub fn builder() -> PreprocessConfigBuilder {
        PreprocessConfigBuilder::default()
    }

    pub fn normalize(&self, token: &str) -> String {
        normalize_with(token, self.fold_taa_marbuta)
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Checks the invariants a deserialized config must satisfy.
    pub fn validate(&self) -> Result<()> {
        if self.min_stem_length == 0 {
            return Err(Error::InvalidConfig("min_stem_length must be >= 1".into()));
        }
        for (name, table) in [("prefix", &self.prefixes), ("suffix", &self.suffixes)] {
            let lens: Vec<usize> = table.iter().map(|a| a.chars().count()).collect();
            if lens.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "{name} table is not sorted longest-first"
                )));
            }
            if lens.contains(&0) {
                return Err(Error::InvalidConfig(format!("empty {name} entry")));
            }
        }
        if let Some(w) = self
            .stopwords
            .iter()
            .find(|w| canonical_entry(w, self.fold_taa_marbuta) != **w)
        {
            return Err(Error::InvalidConfig(format!(
                "stop word '{w}' is not in normalized form"
            )));
        }
        Ok(())
    }

    /// SHA-256 over the stop-word list, one entry per line in sorted order.
    pub fn stopwords_hash(&self) -> String {
        hash_lines(self.stopwords.iter())
    }

    /// SHA-256 over the prefix table, a separator line, then the suffix table.
    pub fn affixes_hash(&self) -> String {
        hash_lines(
            self.prefixes
                .iter()
                .chain(std::iter::once(&"--".to_owned()))
                .chain(self.suffixes.iter()),
        )
    }
}

fn hash_lines<'a>(lines: impl Iterator<Item = &'a String>) -> String {
    let mut hasher = Sha256::new();
    for line in lines {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone)]
pub struct PreprocessConfigBuilder {
    stopwords: Vec<String>,
    min_stem_length: usize,
    prefixes: Vec<String>,
    suffixes: Vec<String>,
    fold_taa_marbuta: bool,
    stages: Stages,
}

impl Default for PreprocessConfigBuilder {
    fn default() -> Self {
        Self {
            stopwords: parse_list(DEFAULT_STOPWORDS),
            min_stem_length: 3,
            prefixes: DEFAULT_PREFIXES.iter().map(|s| s.to_string()).collect(),
            suffixes: DEFAULT_SUFFIXES.iter().map(|s| s.to_string()).collect(),
            fold_taa_marbuta: false,
            stages: Stages::default(),
        }
    }
}

impl PreprocessConfigBuilder {
    pub fn stopwords(mut self, words: Vec<String>) -> Self {
        self.stopwords = words;
        self
    }

    pub fn min_stem_length(mut self, n: usize) -> Self {
        self.min_stem_length = n;
        self
    }

    pub fn prefixes(mut self, prefixes: Vec<String>) -> Self {
        self.prefixes = prefixes;
        self
    }

    pub fn suffixes(mut self, suffixes: Vec<String>) -> Self {
        self.suffixes = suffixes;
        self
    }

    pub fn fold_taa_marbuta(mut self, on: bool) -> Self {
        self.fold_taa_marbuta = on;
        self
    }

    pub fn stages(mut self, stages: Stages) -> Self {
        self.stages = stages;
        self
    }

    /// Normalizes every list entry, drops duplicates and sorts the affix
    /// tables longest-first (stable, so equal-length affixes keep their order).
    pub fn build(self) -> PreprocessConfig {
        let fold = self.fold_taa_marbuta;
        let stopwords = self
            .stopwords
            .iter()
            .map(|w| canonical_entry(w, fold))
            .filter(|w| !w.is_empty())
            .collect();
        PreprocessConfig {
            stopwords,
            min_stem_length: self.min_stem_length.max(1),
            prefixes: affix_table(&self.prefixes, fold),
            suffixes: affix_table(&self.suffixes, fold),
            fold_taa_marbuta: fold,
            stages: self.stages,
        }
    }
}

fn affix_table(entries: &[String], fold: bool) -> Vec<String> {
    let mut table: Vec<String> = Vec::with_capacity(entries.len());
    for entry in entries {
        let e = canonical_entry(entry, fold);
        if !e.is_empty() && !table.contains(&e) {
            table.push(e);
        }
    }
    table.sort_by_key(|a| std::cmp::Reverse(a.chars().count()));
    table
}

/// One entry per line; blank lines and `#` comments ignored.
pub fn parse_list(contents: &str) -> Vec<String> {
    contents
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn read_list_file(path: &Path) -> Result<Vec<String>> {
    let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_list(&contents))
}

pub fn remove_stopwords(tokens: Vec<String>, stopwords: &BTreeSet<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| !stopwords.contains(t)).collect()
}

/// Runs the enabled stages in order.
pub fn preprocess(text: &str, config: &PreprocessConfig) -> Vec<String> {
    let mut tokens = tokenize(text);
    if config.stages.filter {
        tokens = filter_tokens(&tokens);
    }
    if config.stages.normalize {
        tokens = tokens.iter().map(|t| config.normalize(t)).collect();
    }
    if config.stages.stopwords {
        tokens = remove_stopwords(tokens, &config.stopwords);
    }
    if config.stages.stem {
        tokens = tokens.iter().map(|t| light_stem(t, config)).collect();
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = PreprocessConfig::default();
        cfg.validate().unwrap();
        assert!(cfg.stopwords.len() >= 150);
        assert_eq!(cfg.prefixes[..4], toks(&["وال", "بال", "كال", "فال"]));
        assert_eq!(cfg.suffixes.last().map(String::as_str), Some("ا"));
        // duplicate يه collapsed
        assert_eq!(cfg.suffixes.iter().filter(|s| *s == "يه").count(), 1);
    }

    #[test]
    fn stopwords_are_normalized() {
        let cfg = PreprocessConfig::default();
        assert!(cfg.is_stopword("الي"));
        assert!(cfg.is_stopword("في"));
        assert!(!cfg.is_stopword("إلى"));
    }

    #[test]
    fn validate_rejects_unsorted_affixes() {
        let mut cfg = PreprocessConfig::default();
        cfg.prefixes.reverse();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn remove_stopwords_examples() {
        let stop: BTreeSet<String> = ["في".to_string()].into();
        assert_eq!(remove_stopwords(toks(&["في", "البيت"]), &stop), toks(&["البيت"]));
        assert!(remove_stopwords(vec![], &stop).is_empty());
        assert_eq!(
            remove_stopwords(toks(&["كتاب", "قلم"]), &stop),
            toks(&["كتاب", "قلم"])
        );
    }

    #[test]
    fn full_pipeline_example() {
        let cfg = PreprocessConfig::default();
        assert!(preprocess("", &cfg).is_empty());
        // ال is the only prefix stripped from الاولاد
        assert_eq!(
            preprocess("قرأَ الأولاد في المدرسه", &cfg),
            toks(&["قرا", "اولاد", "مدرس"])
        );
    }

    #[test]
    fn disabled_stages_are_skipped() {
        let cfg = PreprocessConfig::builder()
            .stages(Stages {
                stem: false,
                stopwords: false,
                ..Stages::default()
            })
            .build();
        assert_eq!(preprocess("في المدرسه", &cfg), toks(&["في", "المدرسه"]));
    }

    #[test]
    fn list_parsing_skips_comments() {
        assert_eq!(parse_list("# header\nفي\n\n  من  # trailing\n"), toks(&["في", "من"]));
    }

    #[test]
    fn hashes_track_content() {
        let a = PreprocessConfig::default();
        let b = PreprocessConfig::builder().stopwords(vec!["كتاب".into()]).build();
        assert_ne!(a.stopwords_hash(), b.stopwords_hash());
        assert_eq!(a.affixes_hash(), b.affixes_hash());
        assert_eq!(a.stopwords_hash().len(), 64);
    }

    fn arabic_ish() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "ا", "أ", "إ", "آ", "ٱ", "ى", "ة", "ب", "ت", "و", "ف", "ل", "ك", "م", "ن", "ه", "ي",
            "َ", "ً", "ّ", "ْ", "ـ", " ", "\t", "،", "!", "1", "٣", "x", "Z", "://", "www.",
            "ال", "في", "هذا",
        ]);
        prop::collection::vec(pieces, 0..40).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,20}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
            let folded = normalize_with(&s, true);
            prop_assert_eq!(normalize_with(&folded, true), folded);
        }

        #[test]
        fn stem_is_contiguous_substring(tok in "[\u{0621}-\u{064A}]{0,10}") {
            let cfg = PreprocessConfig::default();
            let tok = cfg.normalize(&tok);
            let stem = light_stem(&tok, &cfg);
            prop_assert!(stem.chars().count() <= tok.chars().count());
            prop_assert!(tok.contains(&stem));
            prop_assert!(stem == tok || stem.chars().count() >= cfg.min_stem_length);
        }

        #[test]
        fn pipeline_equals_manual_stage_chain(text in arabic_ish()) {
            let cfg = PreprocessConfig::default();
            let filtered = filter_tokens(&tokenize(&text));
            let normalized: Vec<String> = filtered.iter().map(|t| cfg.normalize(t)).collect();
            let kept = remove_stopwords(normalized, &cfg.stopwords);
            let stemmed: Vec<String> = kept.iter().map(|t| light_stem(t, &cfg)).collect();
            prop_assert_eq!(preprocess(&text, &cfg), stemmed);
        }

        #[test]
        fn pipeline_output_is_clean(text in arabic_ish()) {
            let cfg = PreprocessConfig::default();
            for tok in preprocess(&text, &cfg) {
                prop_assert!(tok.chars().count() >= 2);
                prop_assert!(tok.chars().all(is_arabic_letter));
                prop_assert!(!cfg.is_stopword(&tok));
            }
        }
    }
}
