//! TF-IDF feature extraction over token sequences.
//!
//! The weight of term `t` in document `d` is `tf(t,d) * ln(N / n_t)` with
//! `N` the corpus document count and `n_t` the document frequency of `t`.
//! The natural logarithm is used throughout and no smoothing is applied;
//! `min_df` filtering keeps every stored `n_t >= 1`.

use std::collections::{BTreeMap, HashMap};

use super::{TextModelError, TokenSeq};

/// A sparse feature vector with indices sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVec {
    pub fn new(dim: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(i, _)| i);
        debug_assert!(entries.iter().all(|&(i, _)| i < dim));
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Value at `idx`, zero when absent.
    pub fn get(&self, idx: usize) -> f64 {
        self.entries
            .binary_search_by_key(&idx, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    /// Dense copy, mostly for small test problems.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Fitted TF-IDF vocabulary and document-frequency statistics.
#[derive(Debug, Clone)]
pub struct TfIdfModel {
    vocabulary: BTreeMap<String, usize>,
    doc_count: usize,
    doc_freq: Vec<usize>,
}

impl TfIdfModel {
    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// Column index of `token`, if in the vocabulary.
    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.vocabulary.get(token).copied()
    }

    /// Document frequency for the token at `idx`.
    pub fn doc_freq(&self, idx: usize) -> usize {
        self.doc_freq[idx]
    }

    /// Vocabulary tokens in index order.
    pub fn tokens(&self) -> Vec<&str> {
        let mut out = vec![""; self.vocabulary.len()];
        for (tok, &idx) in &self.vocabulary {
            out[idx] = tok.as_str();
        }
        out
    }

    pub(crate) fn from_parts(
        vocabulary: BTreeMap<String, usize>,
        doc_count: usize,
        doc_freq: Vec<usize>,
    ) -> Self {
        Self {
            vocabulary,
            doc_count,
            doc_freq,
        }
    }

    pub(crate) fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub(crate) fn doc_freqs(&self) -> &[usize] {
        &self.doc_freq
    }

    /// Maps a document onto TF-IDF weights; out-of-vocabulary tokens are
    /// ignored.
    pub fn transform(&self, doc: &TokenSeq) -> SparseVec {
        let mut tf: HashMap<usize, f64> = HashMap::new();
        for token in doc.tokens() {
            if let Some(&idx) = self.vocabulary.get(token.as_str()) {
                *tf.entry(idx).or_insert(0.0) += 1.0;
            }
        }
        let n = self.doc_count as f64;
        let entries = tf
            .into_iter()
            .map(|(idx, count)| (idx, count * (n / self.doc_freq[idx] as f64).ln()))
            .collect();
        SparseVec::new(self.vocabulary.len(), entries)
    }

    /// Transforms a batch of documents.
    pub fn transform_all(&self, docs: &[TokenSeq]) -> Vec<SparseVec> {
        docs.iter().map(|d| self.transform(d)).collect()
    }
}

/// Fits the vocabulary and document frequencies, keeping tokens whose
/// document frequency is at least `min_df`.
pub fn fit_tfidf(docs: &[TokenSeq], min_df: usize) -> Result<TfIdfModel, TextModelError> {
    if docs.is_empty() {
        return Err(TextModelError::EmptyCorpus);
    }
    if min_df < 1 {
        return Err(TextModelError::InvalidParameter(
            "min_df must be at least 1".into(),
        ));
    }

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.tokens().iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for token in seen {
            *df.entry(token).or_insert(0) += 1;
        }
    }

    // BTreeMap iteration is sorted, so indices are dense and deterministic.
    let mut vocabulary = BTreeMap::new();
    let mut doc_freq = Vec::new();
    for (token, count) in df {
        if count >= min_df {
            vocabulary.insert(token.to_string(), doc_freq.len());
            doc_freq.push(count);
        }
    }

    Ok(TfIdfModel {
        vocabulary,
        doc_count: docs.len(),
        doc_freq,
    })
}
