use std::fmt::Write;

use super::{EvalReport, GridReport, GRID_NGRAMS};
use crate::corpus::Label;
use crate::features::{NgramConfig, Representation};

fn representation_title(r: Representation) -> &'static str {
    match r {
        Representation::Count => "Count vectors",
        Representation::Tfidf => "TF-IDF vectors",
    }
}

fn ngram_title(n: NgramConfig) -> String {
    match (n.n_min, n.n_max) {
        (1, 1) => "unigrams".into(),
        (2, 2) => "bigrams".into(),
        (1, 2) => "unigrams + bigrams".into(),
        _ => format!("{}-grams", n.label()),
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        "{:<26}{:>10}{:>11}{:>9}{:>10}",
        "Algorithm", "Accuracy", "Precision", "Recall", "F1-score"
    );
}

fn row(out: &mut String, name: &str, r: &EvalReport) {
    let _ = writeln!(
        out,
        "{:<26}{:>9.2}%{:>11.2}{:>9.2}{:>10.2}",
        name,
        100.0 * r.accuracy,
        r.precision,
        r.recall,
        r.f1
    );
}

/// Six tables (count then TF-IDF; unigrams, bigrams, both), one row per
/// algorithm.
pub fn render_grid(grid: &GridReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "seed {}  train {}  test {}\n",
        grid.seed, grid.n_train, grid.n_test
    );
    let mut table = 0;
    for representation in Representation::ALL {
        for ngrams in GRID_NGRAMS {
            table += 1;
            let _ = writeln!(
                out,
                "Table {table}: {}, {}",
                representation_title(representation),
                ngram_title(ngrams)
            );
            header(&mut out);
            for r in grid.cells.iter().filter(|c| {
                c.config.representation == representation && c.config.ngrams == ngrams.label()
            }) {
                row(&mut out, r.config.algorithm.display_name(), r);
            }
            out.push('\n');
        }
    }
    out
}

/// Summary row, per-class metrics and the confusion matrix of one report.
pub fn render_report(r: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}, {}, {} (seed {}, {} test documents, {} averages)",
        r.config.algorithm.display_name(),
        r.config.representation,
        r.config.ngrams,
        r.config.seed,
        r.n_test,
        r.averaging
    );
    header(&mut out);
    row(&mut out, r.config.algorithm.display_name(), r);
    let _ = writeln!(
        out,
        "\n{:<16}{:>11}{:>9}{:>10}{:>9}",
        "Class", "Precision", "Recall", "F1-score", "Support"
    );
    for c in &r.per_class {
        let _ = writeln!(
            out,
            "{:<16}{:>11.4}{:>9.4}{:>10.4}{:>9}",
            c.label.display_name(),
            c.precision,
            c.recall,
            c.f1,
            c.support
        );
    }
    let _ = write!(out, "\nConfusion (rows gold, columns predicted)\n{:<16}", "");
    for l in Label::ALL {
        let _ = write!(out, "{:>16}", l.display_name());
    }
    out.push('\n');
    for gold in Label::ALL {
        let _ = write!(out, "{:<16}", gold.display_name());
        for pred in Label::ALL {
            let _ = write!(out, "{:>16}", r.confusion.get(gold, pred));
        }
        out.push('\n');
    }
    out
}
