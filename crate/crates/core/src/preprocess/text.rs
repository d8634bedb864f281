//! Character-level stages: tokenizing, filtering and normalizing.

/// Tashkeel marks, fathatan (U+064B) through sukun (U+0652).
pub fn is_diacritic(c: char) -> bool {
    ('\u{064B}'..='\u{0652}').contains(&c)
}

pub const TATWEEL: char = '\u{0640}';

/// Letters of the Arabic block. Excludes diacritics, tatweel, Arabic-Indic
/// digits, Arabic punctuation and the Quranic annotation signs.
pub fn is_arabic_letter(c: char) -> bool {
    matches!(c,
        '\u{0621}'..='\u{063A}'
        | '\u{0641}'..='\u{064A}'
        | '\u{066E}'..='\u{066F}'
        | '\u{0671}'..='\u{06D3}'
        | '\u{06D5}'
        | '\u{06EE}'..='\u{06EF}'
        | '\u{06FA}'..='\u{06FC}'
        | '\u{06FF}')
}

/// Split on Unicode whitespace. Never yields empty tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

fn looks_like_url(token: &str) -> bool {
    token.contains("://") || token.get(..4).is_some_and(|p| p.eq_ignore_ascii_case("www."))
}

/// Strip everything that is not an Arabic letter from each token (punctuation,
/// digits, Latin script, symbols, diacritics, tatweel), then drop URLs, tokens
/// that became empty and single letters.
pub fn filter_tokens(tokens: &[String]) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !looks_like_url(t))
        .filter_map(|t| {
            let kept: String = t.chars().filter(|&c| is_arabic_letter(c)).collect();
            (kept.chars().count() >= 2).then_some(kept)
        })
        .collect()
}

fn fold_char(c: char, fold_taa_marbuta: bool) -> char {
    match c {
        // أ إ آ ٱ
        '\u{0623}' | '\u{0625}' | '\u{0622}' | '\u{0671}' => '\u{0627}',
        // ى
        '\u{0649}' => '\u{064A}',
        // ة
        '\u{0629}' if fold_taa_marbuta => '\u{0647}',
        other => other,
    }
}

/// Alif-Hamza unification and Alif maqsura folding; taa marbuta left alone.
pub fn normalize(token: &str) -> String {
    normalize_with(token, false)
}

pub fn normalize_with(token: &str, fold_taa_marbuta: bool) -> String {
    token.chars().map(|c| fold_char(c, fold_taa_marbuta)).collect()
}

/// Canonical form for list entries (stop words, affixes): diacritics and
/// tatweel removed, then normalized.
pub fn canonical_entry(entry: &str, fold_taa_marbuta: bool) -> String {
    let bare: String = entry
        .trim()
        .chars()
        .filter(|&c| !is_diacritic(c) && c != TATWEEL)
        .collect();
    normalize_with(&bare, fold_taa_marbuta)
}
