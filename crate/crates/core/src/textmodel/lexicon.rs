//! Lexicon-based sentiment scoring with window negation.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::{TextModelError, TokenSeq};

/// Token polarities in [-1, 1] plus a negator set.
///
/// A matched token preceded by a negator within `negation_window` tokens has
/// its polarity sign flipped.
#[derive(Debug, Clone)]
pub struct LexiconModel {
    polarity: HashMap<String, f64>,
    negators: HashSet<String>,
    negation_window: usize,
}

impl LexiconModel {
    pub fn new(
        polarity: HashMap<String, f64>,
        negators: HashSet<String>,
        negation_window: usize,
    ) -> Result<Self, TextModelError> {
        for (token, &value) in &polarity {
            if !(-1.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(TextModelError::PolarityOutOfRange {
                    token: token.clone(),
                    value,
                });
            }
        }
        Ok(Self {
            polarity,
            negators,
            negation_window,
        })
    }

    /// Loads polarities from a `token,polarity` CSV and negators from an
    /// optional one-per-line text file.
    pub fn load(
        lexicon_csv: &Path,
        negators_file: Option<&Path>,
        negation_window: usize,
    ) -> Result<Self, TextModelError> {
        let mut polarity = HashMap::new();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(lexicon_csv)
            .map_err(|e| TextModelError::InvalidParameter(format!("lexicon csv: {e}")))?;
        for row in reader.records() {
            let row = row.map_err(|e| TextModelError::InvalidParameter(format!("lexicon csv: {e}")))?;
            if row.len() != 2 {
                return Err(TextModelError::InvalidParameter(format!(
                    "lexicon csv: expected token,polarity, got {} fields",
                    row.len()
                )));
            }
            let value: f64 = row[1].trim().parse().map_err(|_| {
                TextModelError::InvalidParameter(format!("lexicon csv: bad polarity {:?}", &row[1]))
            })?;
            polarity.insert(row[0].trim().to_lowercase(), value);
        }

        let mut negators = HashSet::new();
        if let Some(path) = negators_file {
            for line in std::fs::read_to_string(path)?.lines() {
                let token = line.trim().to_lowercase();
                if !token.is_empty() {
                    negators.insert(token);
                }
            }
        }

        Self::new(polarity, negators, negation_window)
    }

    pub fn negation_window(&self) -> usize {
        self.negation_window
    }

    pub fn polarity_of(&self, token: &str) -> Option<f64> {
        self.polarity.get(token).copied()
    }
}

/// Mean polarity over matched tokens, sign-flipped under nearby negators.
/// Returns `None` ("no-signal") when no token matches — never `Some(0.0)`
/// for an unmatched document.
pub fn lexicon_sentiment(model: &LexiconModel, doc: &TokenSeq) -> Option<f64> {
    let tokens = doc.tokens();
    let mut sum = 0.0;
    let mut matched = 0usize;
    for (i, token) in tokens.iter().enumerate() {
        let Some(mut value) = model.polarity_of(token) else {
            continue;
        };
        let window_start = i.saturating_sub(model.negation_window);
        if tokens[window_start..i]
            .iter()
            .any(|t| model.negators.contains(t.as_str()))
        {
            value = -value;
        }
        sum += value;
        matched += 1;
    }
    if matched == 0 {
        None
    } else {
        Some(sum / matched as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tokenize;
    use super::*;

    fn model(pairs: &[(&str, f64)], negators: &[&str]) -> LexiconModel {
        LexiconModel::new(
            pairs.iter().map(|&(t, v)| (t.to_string(), v)).collect(),
            negators.iter().map(|s| s.to_string()).collect(),
            3,
        )
        .unwrap()
    }

    #[test]
    fn mean_of_matched_polarities() {
        let m = model(&[("good", 1.0), ("fine", 1.0), ("bad", -1.0)], &[]);
        let score = lexicon_sentiment(&m, &tokenize("good fine bad filler")).unwrap();
        assert!((score - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn negator_flips_sign_within_window() {
        let m = model(&[("good", 0.8)], &["not"]);
        let score = lexicon_sentiment(&m, &tokenize("not good")).unwrap();
        assert!((score + 0.8).abs() < 1e-12);
    }

    #[test]
    fn negator_outside_window_does_not_flip() {
        let m = model(&[("good", 0.8)], &["not"]);
        let score = lexicon_sentiment(&m, &tokenize("not a b c really good")).unwrap();
        assert!((score - 0.8).abs() < 1e-12);
    }

    #[test]
    fn no_match_is_no_signal() {
        let m = model(&[("good", 1.0)], &[]);
        assert_eq!(lexicon_sentiment(&m, &tokenize("nothing matches here")), None);
    }

    #[test]
    fn out_of_range_polarity_rejected() {
        let result = LexiconModel::new(
            [("broken".to_string(), 1.5)].into_iter().collect(),
            HashSet::new(),
            3,
        );
        assert!(matches!(
            result,
            Err(TextModelError::PolarityOutOfRange { .. })
        ));
    }
}
