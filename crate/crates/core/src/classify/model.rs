use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Classifier, Prediction, TrainConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, Featurizer, SparseVector};
use crate::preprocess::{preprocess, PreprocessConfig};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessHashes {
    pub stopwords: String,
    pub affixes: String,
}

/// A classifier together with everything needed to map raw text into its
/// input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub train_config: TrainConfig,
    pub preprocess: PreprocessConfig,
    pub preprocess_hashes: PreprocessHashes,
    pub features: Featurizer,
    pub classifier: Classifier,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

impl TrainedModel {
    /// Preprocesses and featurizes `corpus` (every document must be labeled),
    /// then fits the classifier.
    pub fn train(
        corpus: &Corpus,
        preprocess_config: PreprocessConfig,
        feature_config: FeatureConfig,
        train_config: TrainConfig,
    ) -> Result<Self> {
        train_config.validate()?;
        preprocess_config.validate()?;
        let labels = corpus.labels()?;
        if labels.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let tokens: Vec<Vec<String>> = corpus
            .documents
            .par_iter()
            .map(|d| preprocess(&d.text, &preprocess_config))
            .collect();
        let features = Featurizer::fit(&tokens, feature_config)?;
        let x: Vec<SparseVector> = tokens.par_iter().map(|t| features.transform(t)).collect();
        let classifier = Classifier::train(&x, &labels, features.dim(), &train_config)?;
        Ok(Self {
            format_version: FORMAT_VERSION,
            train_config,
            preprocess_hashes: PreprocessHashes {
                stopwords: preprocess_config.stopwords_hash(),
                affixes: preprocess_config.affixes_hash(),
            },
            preprocess: preprocess_config,
            features,
            classifier,
        })
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    pub fn vectorize(&self, text: &str) -> SparseVector {
        self.features.transform(&preprocess(text, &self.preprocess))
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        self.classifier.predict(x)
    }

    pub fn predict_text(&self, text: &str) -> Prediction {
        let x = self.vectorize(text);
        if x.is_empty() {
            log::warn!("document has no in-vocabulary features; prediction falls back to the model's prior");
        }
        self.classifier
            .predict(&x)
            .expect("featurizer and classifier share a dimension")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let probe: VersionProbe = serde_json::from_str(json)
            .map_err(|e| Error::CorruptModel(format!("cannot read format version: {e}")))?;
        if probe.format_version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: FORMAT_VERSION,
                found: probe.format_version,
            });
        }
        let model: TrainedModel =
            serde_json::from_str(json).map_err(|e| Error::CorruptModel(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }

    fn validate(&self) -> Result<()> {
        let corrupt = |m: String| Err(Error::CorruptModel(m));
        if let Err(e) = self.preprocess.validate() {
            return corrupt(e.to_string());
        }
        if self.preprocess.stopwords_hash() != self.preprocess_hashes.stopwords {
            return corrupt("stop-word list does not match its recorded hash".into());
        }
        if self.preprocess.affixes_hash() != self.preprocess_hashes.affixes {
            return corrupt("affix tables do not match their recorded hash".into());
        }
        self.features.validate()?;
        self.classifier.validate()?;
        if self.classifier.dim() != self.features.dim() {
            return corrupt(format!(
                "classifier expects {} features but the vocabulary has {}",
                self.classifier.dim(),
                self.features.dim()
            ));
        }
        Ok(())
    }
}
