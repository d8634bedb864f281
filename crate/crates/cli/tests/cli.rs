//! Exit codes and input/output behavior of the `qiraa` binary.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn qiraa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qiraa")).args(args).output().unwrap()
}

fn qiraa_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qiraa"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &Path) -> String {
    let path = dir.join("corpus.jsonl");
    let p = path.to_str().unwrap().to_owned();
    let o = qiraa(&[
        "synth", "--docs-per-class", "10,10,10,14", "--vocab-size", "30,30,30,30",
        "--doc-length", "8-20", "--seed", "2", "--out", &p,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    p
}

fn train(dir: &Path, corpus: &str, algo: &str) -> String {
    let out = dir.join(format!("{algo}.json"));
    let m = out.to_str().unwrap().to_owned();
    let o = qiraa(&["train", corpus, "--algo", algo, "--n-trees", "10", "--out", &m]);
    assert!(o.status.success(), "{}", stderr(&o));
    m
}

#[test]
fn missing_corpus_is_a_data_error() {
    let o = qiraa(&["stats", "/nonexistent/corpus.jsonl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/corpus.jsonl"));
}

#[test]
fn unknown_algorithm_is_a_usage_error() {
    let o = qiraa(&["train", "x.jsonl", "--algo", "knn", "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_flag_value_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth(dir.path());
    let o = qiraa(&["grid", &corpus, "--train-fraction", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qiraa(&["synth", "--docs-per-class", "1,2,3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unlabeled_document_names_its_id() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    std::fs::write(
        &path,
        "{\"id\":\"a\",\"text\":\"كلمة\",\"label\":\"easy\"}\n{\"id\":\"orphan\",\"text\":\"نص\"}\n",
    )
    .unwrap();
    let m = dir.path().join("m.json");
    let o = qiraa(&["train", path.to_str().unwrap(), "--algo", "mnb", "--out", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("orphan"), "{}", stderr(&o));
}

#[test]
fn training_documents_predict_their_labels() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth(dir.path());
    let m = train(dir.path(), &corpus, "mnb");
    let o = qiraa(&["predict", &m, &corpus, "--jsonl"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&corpus).unwrap();
    let gold: Vec<(String, String)> = text
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            (v["id"].as_str().unwrap().to_owned(), v["label"].as_str().unwrap().to_owned())
        })
        .collect();
    let predicted: Vec<(String, String)> = stdout(&o)
        .lines()
        .map(|l| {
            let (id, label) = l.split_once('\t').unwrap();
            (id.to_owned(), label.to_owned())
        })
        .collect();
    assert_eq!(predicted, gold);
}

#[test]
fn empty_line_gets_majority_class_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth(dir.path());
    let m = train(dir.path(), &corpus, "mnb");
    let o = qiraa_stdin(&["predict", &m, "--scores"], "\n");
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("very_difficult\t"), "{out}");
    assert_eq!(out.lines().count(), 1);
    assert!(stderr(&o).to_lowercase().contains("warn"), "{}", stderr(&o));
}

#[test]
fn unsupported_model_version_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth(dir.path());
    let m = train(dir.path(), &corpus, "bnb");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    v["format_version"] = 99.into();
    std::fs::write(&m, v.to_string()).unwrap();
    let o = qiraa_stdin(&["predict", &m], "نص\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("99"));
}

#[test]
fn stats_table_has_four_levels_and_total() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth(dir.path());
    let o = qiraa(&["stats", &corpus]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["Easy", "Medium", "Difficult", "Very difficult", "Total"] {
        assert!(out.contains(name), "{out}");
    }
    assert!(stderr(&o).contains("config: {"));
}

#[test]
fn synth_to_stdout_is_deterministic() {
    let args = ["synth", "--docs-per-class", "3,3,3,3", "--seed", "17"];
    let a = qiraa(&args);
    let b = qiraa(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 12);
}

#[test]
fn evaluate_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth(dir.path());
    let m = train(dir.path(), &corpus, "svm");
    let o = qiraa(&["evaluate", &m, &corpus, "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n_test"], 44);
    assert!(v["accuracy"].as_f64().unwrap() > 0.9);
}
