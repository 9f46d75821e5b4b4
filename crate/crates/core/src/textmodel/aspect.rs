//! Aspect-based sentiment over a topical ontology.
//!
//! An ontology maps aspect names (e.g. "cleanliness", "personnel") to trigger
//! tokens. Each sentence containing a trigger becomes a scoring window for
//! that aspect; the per-aspect score is the mean lexicon sentiment over its
//! windows that carry a signal.

use std::collections::BTreeMap;
use std::path::Path;

use super::{lexicon_sentiment, tokenize, LexiconModel, TextModelError};

/// Aspect name -> trigger token list, tokens lowercased.
#[derive(Debug, Clone)]
pub struct AspectOntology {
    aspects: BTreeMap<String, Vec<String>>,
}

impl AspectOntology {
    pub fn new(aspects: BTreeMap<String, Vec<String>>) -> Self {
        let aspects = aspects
            .into_iter()
            .map(|(name, tokens)| {
                (
                    name,
                    tokens.into_iter().map(|t| t.to_lowercase()).collect(),
                )
            })
            .collect();
        Self { aspects }
    }

    /// Loads a JSON object mapping aspect name to a token array.
    pub fn load(path: &Path) -> Result<Self, TextModelError> {
        let text = std::fs::read_to_string(path)?;
        let parsed: BTreeMap<String, Vec<String>> = serde_json::from_str(&text)
            .map_err(|e| TextModelError::InvalidParameter(format!("aspect ontology: {e}")))?;
        Ok(Self::new(parsed))
    }

    pub fn aspect_names(&self) -> impl Iterator<Item = &str> {
        self.aspects.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.aspects.is_empty()
    }
}

/// One sentence window matched to an aspect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectHit {
    pub aspect: String,
    pub sentence: String,
}

/// Splits `text` into sentences and pairs each with the aspects whose
/// trigger tokens it contains (whole-token match).
pub fn aspect_windows(text: &str, ontology: &AspectOntology) -> Vec<AspectHit> {
    let mut hits = Vec::new();
    for sentence in split_sentences(text) {
        let tokens = tokenize(sentence);
        if tokens.is_empty() {
            continue;
        }
        for (aspect, triggers) in &ontology.aspects {
            let matched = tokens
                .tokens()
                .iter()
                .any(|t| triggers.iter().any(|trigger| trigger == t));
            if matched {
                hits.push(AspectHit {
                    aspect: aspect.clone(),
                    sentence: sentence.trim().to_string(),
                });
            }
        }
    }
    hits
}

/// Mean lexicon sentiment per aspect over that aspect's sentence windows.
/// Aspects whose windows all lack lexicon signal are omitted.
pub fn aspect_sentiment(
    text: &str,
    ontology: &AspectOntology,
    lexicon: &LexiconModel,
) -> BTreeMap<String, f64> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for hit in aspect_windows(text, ontology) {
        if let Some(score) = lexicon_sentiment(lexicon, &tokenize(&hit.sentence)) {
            let entry = sums.entry(hit.aspect).or_insert((0.0, 0));
            entry.0 += score;
            entry.1 += 1;
        }
    }
    sums.into_iter()
        .map(|(aspect, (sum, n))| (aspect, sum / n as f64))
        .collect()
}

fn split_sentences(text: &str) -> impl Iterator<Item = &str> {
    text.split(['.', '!', '?', ';', '\n'])
        .filter(|s| !s.trim().is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, HashSet};

    fn ontology() -> AspectOntology {
        AspectOntology::new(
            [
                (
                    "personnel".to_string(),
                    vec!["staff".to_string(), "crew".to_string()],
                ),
                (
                    "environment".to_string(),
                    vec!["clean".to_string(), "dirty".to_string()],
                ),
            ]
            .into_iter()
            .collect(),
        )
    }

    fn lexicon() -> LexiconModel {
        let polarity: HashMap<String, f64> = [
            ("friendly".to_string(), 0.9),
            ("rude".to_string(), -0.9),
            ("dirty".to_string(), -0.6),
        ]
        .into_iter()
        .collect();
        LexiconModel::new(polarity, HashSet::new(), 3).unwrap()
    }

    #[test]
    fn windows_are_per_sentence() {
        let hits = aspect_windows("The staff was friendly. Floors looked dirty!", &ontology());
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].aspect, "personnel");
        assert_eq!(hits[1].aspect, "environment");
        assert_eq!(hits[1].sentence, "Floors looked dirty");
    }

    #[test]
    fn sentiment_scored_on_the_matching_sentence_only() {
        let scores = aspect_sentiment(
            "The staff was friendly. Floors looked dirty!",
            &ontology(),
            &lexicon(),
        );
        assert!((scores["personnel"] - 0.9).abs() < 1e-12);
        assert!((scores["environment"] + 0.6).abs() < 1e-12);
    }

    #[test]
    fn aspect_without_signal_is_omitted() {
        let scores = aspect_sentiment("The crew arrived.", &ontology(), &lexicon());
        assert!(scores.is_empty());
    }

    #[test]
    fn one_sentence_can_hit_multiple_aspects() {
        let hits = aspect_windows("Rude staff in a dirty hall", &ontology());
        let aspects: Vec<&str> = hits.iter().map(|h| h.aspect.as_str()).collect();
        assert_eq!(aspects, ["environment", "personnel"]);
    }
}
