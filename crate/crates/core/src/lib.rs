//! Arabic text readability classification.
//!
//! The pipeline runs raw text through [`preprocess`] (tokenize, filter,
//! normalize, stop-word removal, light stemming), turns the token stream into
//! word n-gram Count or TF-IDF vectors with [`features`], and assigns one of four
//! readability [`Label`]s with one of the classifiers in [`classify`].
//! [`eval`] computes accuracy and macro precision/recall/F1 and runs the full
//! representation × n-gram × algorithm grid. [`synth`] generates labelled
//! corpora with tunable vocabulary overlap for testing.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod preprocess;
pub mod rng;
pub mod synth;

pub use classify::{Algorithm, Prediction, TrainConfig, TrainedModel};
pub use corpus::{Corpus, CorpusStats, Document, Label};
pub use error::{Error, Result};
pub use features::{NgramConfig, Representation, SparseVector};
pub use preprocess::PreprocessConfig;
