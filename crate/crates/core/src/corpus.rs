//! Labelled document collections: JSONL I/O, per-class statistics and the
//! stratified train/test split.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{preprocess, tokenize, PreprocessConfig};
use crate::rng::SplitMix64;

/// Readability level. The declaration order is the canonical order used for
/// tie-breaking and for every per-class array in the crate.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Easy,
    Medium,
    Difficult,
    VeryDifficult,
}

impl Label {
    pub const ALL: [Label; 4] = [
        Label::Easy,
        Label::Medium,
        Label::Difficult,
        Label::VeryDifficult,
    ];
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    /// Name used in files and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Easy => "easy",
            Label::Medium => "medium",
            Label::Difficult => "difficult",
            Label::VeryDifficult => "very_difficult",
        }
    }

    /// Name used in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Label::Easy => "Easy",
            Label::Medium => "Medium",
            Label::Difficult => "Difficult",
            Label::VeryDifficult => "Very difficult",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<Label>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            label,
        }
    }

    fn require_label(&self) -> Result<Label> {
        self.label.ok_or_else(|| Error::Unlabeled(self.id.clone()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

// On-disk record: `id` optional, `label` a free string so unknown values can
// be reported with their line number.
#[derive(Deserialize)]
struct Record {
    id: Option<String>,
    text: String,
    label: Option<String>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Self {
        Self { documents }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file)).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
    }

    /// Parses JSONL. Blank lines are skipped; line numbers are 1-based.
    pub fn from_reader(mut reader: impl BufRead) -> Result<Self> {
        let mut documents = Vec::new();
        let mut seen = HashSet::new();
        let mut buf = Vec::new();
        let mut lineno = 0;
        loop {
            buf.clear();
            let n = reader
                .read_until(b'\n', &mut buf)
                .map_err(|e| Error::io("<input>", e))?;
            if n == 0 {
                break;
            }
            lineno += 1;
            let line = std::str::from_utf8(&buf).map_err(|e| Error::MalformedLine {
                line: lineno,
                message: format!("invalid UTF-8: {e}"),
            })?;
            let line = line.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                continue;
            }
            let record: Record =
                serde_json::from_str(line).map_err(|e| Error::MalformedLine {
                    line: lineno,
                    message: e.to_string(),
                })?;
            let label = record
                .label
                .map(|l| {
                    l.parse::<Label>().map_err(|_| Error::UnknownLabelAtLine {
                        label: l,
                        line: lineno,
                    })
                })
                .transpose()?;
            let id = record.id.unwrap_or_else(|| format!("doc-{lineno}"));
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            documents.push(Document {
                id,
                text: record.text,
                label,
            });
        }
        Ok(Self { documents })
    }

    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut out, doc)?;
            out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_jsonl(&mut out)?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Gold labels in document order; errors on the first unlabelled document.
    pub fn labels(&self) -> Result<Vec<Label>> {
        self.documents.iter().map(Document::require_label).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassStats {
    pub documents: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    /// Indexed by [`Label::index`].
    pub per_label: [ClassStats; Label::COUNT],
    pub total: ClassStats,
}

impl CorpusStats {
    pub fn get(&self, label: Label) -> ClassStats {
        self.per_label[label.index()]
    }

    /// Table layout: Category, #Documents, #Tokens, then a total row.
    pub fn render(&self) -> String {
        let mut out = format!("{:<16}{:>12}{:>12}\n", "Category", "#Documents", "#Tokens");
        for label in Label::ALL {
            let s = self.get(label);
            out += &format!(
                "{:<16}{:>12}{:>12}\n",
                label.display_name(),
                s.documents,
                s.tokens
            );
        }
        out += &format!(
            "{:<16}{:>12}{:>12}\n",
            "Total", self.total.documents, self.total.tokens
        );
        out
    }
}

/// Which token stream [`corpus_stats`] counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenCount {
    /// Whitespace tokens before any filtering.
    Raw,
    /// Tokens surviving the full preprocessing pipeline.
    Processed,
}

pub fn corpus_stats(
    corpus: &Corpus,
    config: &PreprocessConfig,
    counting: TokenCount,
) -> Result<CorpusStats> {
    let mut per_label = [ClassStats::default(); Label::COUNT];
    for doc in &corpus.documents {
        let label = doc.require_label()?;
        let tokens = match counting {
            TokenCount::Raw => tokenize(&doc.text).len(),
            TokenCount::Processed => preprocess(&doc.text, config).len(),
        };
        let entry = &mut per_label[label.index()];
        entry.documents += 1;
        entry.tokens += tokens;
    }
    let total = per_label.iter().fold(ClassStats::default(), |acc, s| ClassStats {
        documents: acc.documents + s.documents,
        tokens: acc.tokens + s.tokens,
    });
    Ok(CorpusStats { per_label, total })
}

/// Number of training documents per label.
///
/// Each stratum gets `round(fraction * n)` (a lone document always goes to
/// training), then the largest stratum absorbs the difference so that the
/// global training size is `floor(fraction * N)`.
pub fn stratum_train_sizes(sizes: &[usize; Label::COUNT], fraction: f64) -> [usize; Label::COUNT] {
    let mut train = [0usize; Label::COUNT];
    for (t, &n) in train.iter_mut().zip(sizes) {
        *t = match n {
            0 => 0,
            1 => 1,
            n => ((fraction * n as f64).round() as usize).min(n),
        };
    }
    let total: usize = sizes.iter().sum();
    let target = (fraction * total as f64).floor() as usize;
    let assigned: usize = train.iter().sum();
    // first of the largest strata in canonical order
    let largest = (0..Label::COUNT)
        .rev()
        .max_by_key(|&i| sizes[i])
        .unwrap_or(0);
    if assigned > target {
        let excess = assigned - target;
        let floor = usize::from(sizes[largest] == 1);
        train[largest] = train[largest].saturating_sub(excess).max(floor);
    } else if assigned < target {
        train[largest] = (train[largest] + (target - assigned)).min(sizes[largest]);
    }
    train
}

/// Stratified, seeded split. Each label's documents are shuffled with
/// Fisher–Yates using the stream `SplitMix64::derive(seed, label index)`; the
/// first `stratum_train_sizes` of them go to training. Both halves keep the
/// input's document order.
pub fn split(corpus: &Corpus, train_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let labels = corpus.labels()?;
    let mut strata: [Vec<usize>; Label::COUNT] = Default::default();
    for (i, label) in labels.iter().enumerate() {
        strata[label.index()].push(i);
    }
    let sizes = strata.each_ref().map(Vec::len);
    let train_sizes = stratum_train_sizes(&sizes, train_fraction);

    let mut in_train = vec![false; corpus.len()];
    for (k, stratum) in strata.iter_mut().enumerate() {
        SplitMix64::derive(seed, k as u64).shuffle(stratum);
        for &i in &stratum[..train_sizes[k]] {
            in_train[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (doc, &t) in corpus.documents.iter().zip(&in_train) {
        if t {
            train.push(doc.clone());
        } else {
            test.push(doc.clone());
        }
    }
    Ok((Corpus::new(train), Corpus::new(test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn parse(s: &str) -> Result<Corpus> {
        Corpus::from_reader(Cursor::new(s.as_bytes().to_vec()))
    }

    fn labelled(counts: [usize; 4]) -> Corpus {
        let mut docs = Vec::new();
        for (k, &n) in counts.iter().enumerate() {
            for i in 0..n {
                docs.push(Document::new(
                    format!("{k}-{i}"),
                    format!("نص{i}"),
                    Label::from_index(k),
                ));
            }
        }
        Corpus::new(docs)
    }

    #[test]
    fn label_parsing() {
        assert_eq!("very_difficult".parse::<Label>().unwrap(), Label::VeryDifficult);
        assert!("hard".parse::<Label>().is_err());
        assert!("Easy".parse::<Label>().is_err());
        assert_eq!(Label::Difficult.index(), 2);
    }

    #[test]
    fn load_two_lines() {
        let c = parse(
            "{\"id\":\"a\",\"text\":\"نص\",\"label\":\"easy\"}\n{\"text\":\"آخر\"}\n",
        )
        .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.documents[0].label, Some(Label::Easy));
        assert_eq!(c.documents[1].id, "doc-2");
        assert_eq!(c.documents[1].label, None);
    }

    #[test]
    fn load_empty() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn unknown_label_names_line() {
        let err = parse("{\"text\":\"x\",\"label\":\"easy\"}\n{\"text\":\"y\",\"label\":\"hard\"}\n")
            .unwrap_err();
        assert_eq!(err.to_string(), "unknown label 'hard' at line 2");
    }

    #[test]
    fn malformed_line_is_reported() {
        let err = parse("{\"text\":\"x\"}\nnot json\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 2, .. }), "{err}");
        let err = parse("{\"id\":\"x\"}\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn non_utf8_is_rejected() {
        let bytes = b"{\"text\":\"\xff\xfe\"}\n".to_vec();
        assert!(Corpus::from_reader(Cursor::new(bytes)).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = parse("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)));
    }

    #[test]
    fn stats_single_class() {
        let c = labelled([0, 3, 0, 0]);
        let s = corpus_stats(&c, &PreprocessConfig::default(), TokenCount::Raw).unwrap();
        assert_eq!(s.get(Label::Medium).documents, 3);
        assert_eq!(s.get(Label::Easy).documents, 0);
        assert_eq!(s.total.documents, 3);
        assert_eq!(s.total.tokens, 3);
    }

    #[test]
    fn stats_post_pipeline_tokens() {
        let c = Corpus::new(vec![Document::new(
            "x",
            "قرأَ الأولاد في المدرسه 2021",
            Some(Label::Easy),
        )]);
        let cfg = PreprocessConfig::default();
        assert_eq!(corpus_stats(&c, &cfg, TokenCount::Processed).unwrap().total.tokens, 3);
        assert_eq!(corpus_stats(&c, &cfg, TokenCount::Raw).unwrap().total.tokens, 5);
    }

    #[test]
    fn stats_unlabelled_doc_is_an_error() {
        let mut c = labelled([1, 0, 0, 0]);
        c.documents.push(Document::new("orphan", "نص", None));
        let err = corpus_stats(&c, &PreprocessConfig::default(), TokenCount::Raw).unwrap_err();
        assert!(err.to_string().contains("orphan"));
    }

    #[test]
    fn split_ten_docs() {
        let c = labelled([5, 5, 0, 0]);
        let (train, test) = split(&c, 0.8, 42).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let count = |c: &Corpus, l| c.documents.iter().filter(|d| d.label == Some(l)).count();
        assert_eq!(count(&train, Label::Easy), 4);
        assert_eq!(count(&train, Label::Medium), 4);
        assert_eq!(count(&test, Label::Easy), 1);
    }

    #[test]
    fn split_sizes_at_full_scale() {
        let sizes = [6691, 8844, 9326, 14931];
        let train = stratum_train_sizes(&sizes, 0.8);
        let total: usize = train.iter().sum();
        assert_eq!(total, 31_833);
        assert_eq!(39_792 - total, 7_959);
        assert_eq!(train, [5353, 7075, 7461, 11944]);
    }

    #[test]
    fn lone_document_goes_to_train() {
        let c = labelled([1, 4, 0, 0]);
        let (train, _) = split(&c, 0.5, 1).unwrap();
        assert!(train.documents.iter().any(|d| d.label == Some(Label::Easy)));
    }

    #[test]
    fn split_rejects_bad_fraction_and_unlabelled() {
        let c = labelled([2, 2, 0, 0]);
        assert!(split(&c, 1.0, 0).is_err());
        assert!(split(&c, 0.0, 0).is_err());
        let mut c = c;
        c.documents.push(Document::new("u", "x", None));
        assert!(matches!(split(&c, 0.5, 0), Err(Error::Unlabeled(_))));
    }

    proptest! {
        #[test]
        fn split_is_a_deterministic_partition(
            counts in prop::array::uniform4(0usize..30),
            fraction in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            let c = labelled(counts);
            let (train, test) = split(&c, fraction, seed).unwrap();
            let (train2, test2) = split(&c, fraction, seed).unwrap();
            prop_assert_eq!(&train, &train2);
            prop_assert_eq!(&test, &test2);
            prop_assert_eq!(train.len() + test.len(), c.len());
            let mut ids: Vec<&str> = train.documents.iter().chain(&test.documents).map(|d| d.id.as_str()).collect();
            ids.sort_unstable();
            ids.dedup();
            prop_assert_eq!(ids.len(), c.len());
            let total: usize = counts.iter().sum();
            if counts.iter().all(|&n| n != 1) {
                prop_assert_eq!(train.len(), (fraction * total as f64).floor() as usize);
            }
        }

        #[test]
        fn jsonl_round_trip(texts in prop::collection::vec(("\\PC{0,12}", prop::option::of(0usize..4)), 0..8)) {
            let docs: Vec<Document> = texts.into_iter().enumerate()
                .map(|(i, (t, l))| Document::new(format!("d{i}"), t, l.and_then(Label::from_index)))
                .collect();
            let c = Corpus::new(docs);
            let mut buf = Vec::new();
            c.write_jsonl(&mut buf).unwrap();
            prop_assert_eq!(Corpus::from_reader(Cursor::new(buf)).unwrap(), c);
        }
    }
}
