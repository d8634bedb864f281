use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Word n-gram range. Words inside an n-gram are joined by a single space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NgramConfig {
    pub n_min: usize,
    pub n_max: usize,
}

impl NgramConfig {
    pub const UNIGRAMS: NgramConfig = NgramConfig { n_min: 1, n_max: 1 };
    pub const BIGRAMS: NgramConfig = NgramConfig { n_min: 2, n_max: 2 };
    pub const UNI_BI: NgramConfig = NgramConfig { n_min: 1, n_max: 2 };

    pub const JOINER: char = ' ';

    pub fn new(n_min: usize, n_max: usize) -> Result<Self> {
        if n_min == 0 || n_min > n_max {
            return Err(Error::InvalidConfig(format!(
                "invalid n-gram range ({n_min}, {n_max})"
            )));
        }
        if n_max > 2 {
            log::warn!("n-gram range ({n_min}, {n_max}) goes beyond bigrams; experimental");
        }
        Ok(Self { n_min, n_max })
    }

    /// `1`, `2`, `1-2`, ... as used on the command line.
    pub fn label(&self) -> String {
        if self.n_min == self.n_max {
            self.n_min.to_string()
        } else {
            format!("{}-{}", self.n_min, self.n_max)
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("invalid n-gram setting '{s}'"));
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (a, b),
            None => (s, s),
        };
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Self::new(lo, hi)
    }
}

/// All n-grams for `n` in `n_min..=n_max`, one sweep per `n`, each in
/// document order.
pub fn extract_ngrams(tokens: &[String], config: NgramConfig) -> Vec<String> {
    let mut out = Vec::new();
    for n in config.n_min..=config.n_max {
        if n == 0 || tokens.len() < n {
            continue;
        }
        out.extend(tokens.windows(n).map(|w| w.join(" ")));
    }
    out
}
