//! Light stemming: strip one prefix and one suffix, never infixes.

use super::PreprocessConfig;

/// Shortest stem a strip may leave behind, whatever the configuration says.
/// A single remaining letter would reintroduce the one-letter tokens the
/// filter removes.
const STEM_FLOOR: usize = 2;

/// Strip at most one prefix, then at most one suffix. Affixes are tried
/// longest-first; a strip is taken only when the remainder keeps at least
/// `min_stem_length` letters and is not itself a stop word. The first affix
/// that passes both checks wins.
///
/// One-letter prefixes (و ف ب ك ل) are also common root letters, so they
/// need one letter more of remainder: كتاب stays whole, وكتاب loses its و.
pub fn light_stem(token: &str, config: &PreprocessConfig) -> String {
    let min_len = config.min_stem_length.max(STEM_FLOOR);
    let mut stem = token;

    for prefix in &config.prefixes {
        if let Some(rest) = stem.strip_prefix(prefix.as_str()) {
            let needed = if prefix.chars().count() == 1 { min_len + 1 } else { min_len };
            if acceptable(rest, needed, config) {
                stem = rest;
                break;
            }
        }
    }
    for suffix in &config.suffixes {
        if let Some(rest) = stem.strip_suffix(suffix.as_str()) {
            if acceptable(rest, min_len, config) {
                stem = rest;
                break;
            }
        }
    }
    stem.to_owned()
}

fn acceptable(rest: &str, min_len: usize, config: &PreprocessConfig) -> bool {
    rest.chars().count() >= min_len && !config.stopwords.contains(rest)
}
