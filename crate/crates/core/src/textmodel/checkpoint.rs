//! Versioned JSON checkpoints for a fitted TF-IDF model plus classifier.
//!
//! Weights are stored as decimal strings (Rust's shortest round-trip float
//! formatting), so a save/load cycle is bit-exact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClassifierKind, LinearClassifier, TextModelError, TfIdfModel};

const CHECKPOINT_VERSION: u32 = 1;

/// A serializable (TF-IDF vocabulary, linear classifier) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TextClassifierCheckpoint {
    version: u32,
    tfidf: TfIdfPart,
    classifier: ClassifierPart,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TfIdfPart {
    doc_count: usize,
    vocabulary: BTreeMap<String, usize>,
    doc_freq: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClassifierPart {
    kind: ClassifierKind,
    classes: Vec<String>,
    /// Row per class, each weight a decimal string.
    weights: Vec<Vec<String>>,
    bias: Vec<String>,
}

impl TextClassifierCheckpoint {
    pub fn new(tfidf: &TfIdfModel, classifier: &LinearClassifier) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            tfidf: TfIdfPart {
                doc_count: tfidf.doc_count(),
                vocabulary: tfidf.vocabulary().clone(),
                doc_freq: tfidf.doc_freqs().to_vec(),
            },
            classifier: ClassifierPart {
                kind: classifier.kind(),
                classes: classifier.classes().to_vec(),
                weights: classifier
                    .weights()
                    .iter()
                    .map(|row| row.iter().map(|w| format!("{w}")).collect())
                    .collect(),
                bias: classifier.bias().iter().map(|b| format!("{b}")).collect(),
            },
        }
    }

    pub fn into_models(self) -> Result<(TfIdfModel, LinearClassifier), TextModelError> {
        if self.version != CHECKPOINT_VERSION {
            return Err(TextModelError::MalformedCheckpoint(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let vocab_size = self.tfidf.vocabulary.len();
        if self.tfidf.doc_freq.len() != vocab_size {
            return Err(TextModelError::MalformedCheckpoint(
                "doc_freq length does not match vocabulary".into(),
            ));
        }
        let tfidf = TfIdfModel::from_parts(
            self.tfidf.vocabulary,
            self.tfidf.doc_count,
            self.tfidf.doc_freq,
        );

        let parse = |s: &str| -> Result<f64, TextModelError> {
            s.parse()
                .map_err(|_| TextModelError::MalformedCheckpoint(format!("bad weight {s:?}")))
        };
        let mut weights = Vec::with_capacity(self.classifier.weights.len());
        for row in &self.classifier.weights {
            if row.len() != vocab_size {
                return Err(TextModelError::MalformedCheckpoint(
                    "weight row length does not match vocabulary".into(),
                ));
            }
            weights.push(row.iter().map(|w| parse(w)).collect::<Result<Vec<_>, _>>()?);
        }
        if weights.len() != self.classifier.classes.len()
            || self.classifier.bias.len() != self.classifier.classes.len()
        {
            return Err(TextModelError::MalformedCheckpoint(
                "class count does not match weights/bias".into(),
            ));
        }
        let bias = self
            .classifier
            .bias
            .iter()
            .map(|b| parse(b))
            .collect::<Result<Vec<_>, _>>()?;

        let classifier = LinearClassifier::from_parts(
            self.classifier.kind,
            self.classifier.classes,
            weights,
            bias,
        );
        Ok((tfidf, classifier))
    }
}

/// Writes a checkpoint as pretty-printed JSON.
pub fn save_checkpoint(
    path: &Path,
    tfidf: &TfIdfModel,
    classifier: &LinearClassifier,
) -> Result<(), TextModelError> {
    let checkpoint = TextClassifierCheckpoint::new(tfidf, classifier);
    let json = serde_json::to_string_pretty(&checkpoint)
        .map_err(|e| TextModelError::MalformedCheckpoint(e.to_string()))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

/// Reads a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<(TfIdfModel, LinearClassifier), TextModelError> {
    let text = std::fs::read_to_string(path)?;
    let checkpoint: TextClassifierCheckpoint = serde_json::from_str(&text)
        .map_err(|e| TextModelError::MalformedCheckpoint(e.to_string()))?;
    checkpoint.into_models()
}

#[cfg(test)]
mod tests {
    use super::super::{fit_tfidf, tokenize, train};
    use super::*;

    #[test]
    fn save_load_is_bit_exact() {
        let docs: Vec<_> = ["good fine day", "bad awful day", "good bad mixed"]
            .iter()
            .map(|t| tokenize(t))
            .collect();
        let tfidf = fit_tfidf(&docs, 1).unwrap();
        let features = tfidf.transform_all(&docs);
        let labels = vec!["p".to_string(), "n".to_string(), "n".to_string()];
        let model = train(ClassifierKind::LogisticRegression, &features, &labels).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_checkpoint(&path, &tfidf, &model).unwrap();
        let (tfidf2, model2) = load_checkpoint(&path).unwrap();

        assert_eq!(tfidf.doc_count(), tfidf2.doc_count());
        assert_eq!(tfidf.tokens(), tfidf2.tokens());
        assert_eq!(model.classes(), model2.classes());
        for (a, b) in model.weights().iter().zip(model2.weights()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        for (x, y) in model.bias().iter().zip(model2.bias()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn version_mismatch_rejected() {
        let json = r#"{"version":99,"tfidf":{"doc_count":1,"vocabulary":{},"doc_freq":[]},
            "classifier":{"kind":"logistic-regression","classes":[],"weights":[],"bias":[]}}"#;
        let checkpoint: TextClassifierCheckpoint = serde_json::from_str(json).unwrap();
        assert!(matches!(
            checkpoint.into_models(),
            Err(TextModelError::MalformedCheckpoint(_))
        ));
    }
}
