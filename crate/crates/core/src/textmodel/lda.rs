//! Latent topic modeling by collapsed Gibbs sampling.
//!
//! Documents are mixtures over `K` topics and each topic is a distribution
//! over the vocabulary. The sampler draws every token's topic assignment from
//! its collapsed conditional
//! `(n_dk + alpha) * (n_kv + beta) / (n_k + V*beta)` and reports
//! posterior-mean estimates from the final counts. Runs are deterministic
//! given the seed: documents and tokens are visited in input order and all
//! randomness comes from one seeded generator.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{TextModelError, TokenSeq};

/// Posterior-mean LDA estimates plus the final token assignments.
#[derive(Debug, Clone)]
pub struct TopicModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `topic_word[k][v]`, rows sum to 1.
    pub topic_word: Vec<Vec<f64>>,
    /// `doc_topic[d][k]`, rows sum to 1.
    pub doc_topic: Vec<Vec<f64>>,
    /// Per-document, per-token topic assignments.
    pub assignments: Vec<Vec<usize>>,
    /// Vocabulary tokens in column order.
    pub vocab: Vec<String>,
}

impl TopicModel {
    /// The `top_n` highest-probability tokens of topic `k`.
    pub fn top_tokens(&self, k: usize, top_n: usize) -> Vec<(&str, f64)> {
        let mut ranked: Vec<(usize, f64)> = self.topic_word[k]
            .iter()
            .copied()
            .enumerate()
            .collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        ranked
            .into_iter()
            .take(top_n)
            .map(|(v, p)| (self.vocab[v].as_str(), p))
            .collect()
    }

    /// Majority topic of document `d` under the posterior mean.
    pub fn dominant_topic(&self, d: usize) -> usize {
        let row = &self.doc_topic[d];
        let mut best = 0;
        for k in 1..row.len() {
            if row[k] > row[best] {
                best = k;
            }
        }
        best
    }
}

/// Collapsed Gibbs sampler state. Exposed so callers can drive sweeps
/// incrementally and inspect the count caches.
pub struct GibbsSampler {
    k: usize,
    alpha: f64,
    beta: f64,
    vocab: Vec<String>,
    /// Token ids per document.
    docs: Vec<Vec<usize>>,
    /// Topic assignment per token.
    z: Vec<Vec<usize>>,
    /// doc x topic counts.
    n_dk: Vec<Vec<u32>>,
    /// topic x vocab counts.
    n_kv: Vec<Vec<u32>>,
    /// per-topic totals.
    n_k: Vec<u32>,
    rng: ChaCha8Rng,
}

impl GibbsSampler {
    /// Builds the sampler with random initial assignments drawn from `seed`.
    pub fn new(
        docs: &[TokenSeq],
        k: usize,
        alpha: f64,
        beta: f64,
        seed: u64,
    ) -> Result<Self, TextModelError> {
        if k < 1 {
            return Err(TextModelError::InvalidParameter("K must be >= 1".into()));
        }
        if alpha <= 0.0 || beta <= 0.0 {
            return Err(TextModelError::InvalidParameter(
                "alpha and beta must be positive".into(),
            ));
        }
        if docs.is_empty() || docs.iter().all(TokenSeq::is_empty) {
            return Err(TextModelError::AllDocsEmpty);
        }

        let mut vocab_index: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            for token in doc.tokens() {
                let next = vocab_index.len();
                vocab_index.entry(token.as_str()).or_insert(next);
            }
        }
        // Re-index in sorted order so column ids are independent of document order.
        let vocab: Vec<String> = vocab_index.keys().map(|t| t.to_string()).collect();
        let sorted_index: BTreeMap<&str, usize> = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();

        let token_docs: Vec<Vec<usize>> = docs
            .iter()
            .map(|doc| {
                doc.tokens()
                    .iter()
                    .map(|t| sorted_index[t.as_str()])
                    .collect()
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = vocab.len();
        let mut n_dk = vec![vec![0u32; k]; token_docs.len()];
        let mut n_kv = vec![vec![0u32; v]; k];
        let mut n_k = vec![0u32; k];
        let mut z = Vec::with_capacity(token_docs.len());
        for (d, tokens) in token_docs.iter().enumerate() {
            let mut z_d = Vec::with_capacity(tokens.len());
            for &w in tokens {
                let topic = rng.random_range(0..k);
                z_d.push(topic);
                n_dk[d][topic] += 1;
                n_kv[topic][w] += 1;
                n_k[topic] += 1;
            }
            z.push(z_d);
        }

        Ok(Self {
            k,
            alpha,
            beta,
            vocab,
            docs: token_docs,
            z,
            n_dk,
            n_kv,
            n_k,
            rng,
        })
    }

    /// One full Gibbs sweep over every token in document order.
    pub fn sweep(&mut self) {
        let v_beta = self.vocab.len() as f64 * self.beta;
        let mut weights = vec![0.0f64; self.k];
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i];
                let old = self.z[d][i];
                self.n_dk[d][old] -= 1;
                self.n_kv[old][w] -= 1;
                self.n_k[old] -= 1;

                let mut total = 0.0;
                for t in 0..self.k {
                    let weight = (self.n_dk[d][t] as f64 + self.alpha)
                        * (self.n_kv[t][w] as f64 + self.beta)
                        / (self.n_k[t] as f64 + v_beta);
                    weights[t] = weight;
                    total += weight;
                }
                let mut target = self.rng.random::<f64>() * total;
                let mut new = self.k - 1;
                for (t, &weight) in weights.iter().enumerate() {
                    target -= weight;
                    if target <= 0.0 {
                        new = t;
                        break;
                    }
                }

                self.z[d][i] = new;
                self.n_dk[d][new] += 1;
                self.n_kv[new][w] += 1;
                self.n_k[new] += 1;
            }
        }
    }

    /// doc x topic count cache.
    pub fn doc_topic_counts(&self) -> &[Vec<u32>] {
        &self.n_dk
    }

    /// topic x vocab count cache.
    pub fn topic_word_counts(&self) -> &[Vec<u32>] {
        &self.n_kv
    }

    /// Recomputes all count caches from the assignments. Used to check that
    /// the incremental bookkeeping has not drifted.
    pub fn recount(&self) -> (Vec<Vec<u32>>, Vec<Vec<u32>>, Vec<u32>) {
        let mut n_dk = vec![vec![0u32; self.k]; self.docs.len()];
        let mut n_kv = vec![vec![0u32; self.vocab.len()]; self.k];
        let mut n_k = vec![0u32; self.k];
        for (d, tokens) in self.docs.iter().enumerate() {
            for (i, &w) in tokens.iter().enumerate() {
                let t = self.z[d][i];
                n_dk[d][t] += 1;
                n_kv[t][w] += 1;
                n_k[t] += 1;
            }
        }
        (n_dk, n_kv, n_k)
    }

    /// True when the incremental caches match a fresh recount.
    pub fn counts_consistent(&self) -> bool {
        let (n_dk, n_kv, n_k) = self.recount();
        n_dk == self.n_dk && n_kv == self.n_kv && n_k == self.n_k
    }

    /// Posterior-mean estimates from the current counts.
    pub fn into_model(self) -> TopicModel {
        let v = self.vocab.len();
        let v_beta = v as f64 * self.beta;
        let k_alpha = self.k as f64 * self.alpha;

        let topic_word = (0..self.k)
            .map(|t| {
                let denom = self.n_k[t] as f64 + v_beta;
                (0..v)
                    .map(|w| (self.n_kv[t][w] as f64 + self.beta) / denom)
                    .collect()
            })
            .collect();
        let doc_topic = (0..self.docs.len())
            .map(|d| {
                let n_d: u32 = self.n_dk[d].iter().sum();
                let denom = n_d as f64 + k_alpha;
                (0..self.k)
                    .map(|t| (self.n_dk[d][t] as f64 + self.alpha) / denom)
                    .collect()
            })
            .collect();

        TopicModel {
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            topic_word,
            doc_topic,
            assignments: self.z,
            vocab: self.vocab,
        }
    }
}

/// Fits an LDA model with `iters` collapsed Gibbs sweeps.
pub fn fit_lda(
    docs: &[TokenSeq],
    k: usize,
    alpha: f64,
    beta: f64,
    iters: usize,
    seed: u64,
) -> Result<TopicModel, TextModelError> {
    let mut sampler = GibbsSampler::new(docs, k, alpha, beta, seed)?;
    for _ in 0..iters {
        sampler.sweep();
    }
    Ok(sampler.into_model())
}

#[cfg(test)]
mod tests {
    use super::super::tokenize;
    use super::*;

    fn docs(texts: &[&str]) -> Vec<TokenSeq> {
        texts.iter().map(|t| tokenize(t)).collect()
    }

    #[test]
    fn single_topic_is_degenerate() {
        let model = fit_lda(&docs(&["a b c", "b c d"]), 1, 0.1, 0.01, 10, 7).unwrap();
        for z_d in &model.assignments {
            assert!(z_d.iter().all(|&t| t == 0));
        }
        for row in &model.doc_topic {
            assert_eq!(row.len(), 1);
            assert!((row[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rows_are_normalized() {
        let model = fit_lda(&docs(&["x y z", "y z w", "w x"]), 3, 0.5, 0.1, 20, 3).unwrap();
        for row in model.topic_word.iter().chain(&model.doc_topic) {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "row sum {sum}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let d = docs(&["alpha beta", "beta gamma", "gamma alpha delta"]);
        let a = fit_lda(&d, 2, 0.1, 0.01, 50, 42).unwrap();
        let b = fit_lda(&d, 2, 0.1, 0.01, 50, 42).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.topic_word, b.topic_word);
    }

    #[test]
    fn counts_stay_consistent_across_sweeps() {
        let d = docs(&["a b c d", "c d e f", "e f a b"]);
        let mut sampler = GibbsSampler::new(&d, 3, 0.2, 0.05, 11).unwrap();
        for block in 0..5 {
            for _ in 0..10 {
                sampler.sweep();
            }
            assert!(sampler.counts_consistent(), "drift after block {block}");
        }
    }

    #[test]
    fn all_empty_docs_is_an_error() {
        assert!(matches!(
            fit_lda(&docs(&["", "  "]), 2, 0.1, 0.01, 5, 0),
            Err(TextModelError::AllDocsEmpty)
        ));
    }

    #[test]
    fn invalid_priors_rejected() {
        let d = docs(&["a b"]);
        assert!(fit_lda(&d, 2, 0.0, 0.1, 5, 0).is_err());
        assert!(fit_lda(&d, 0, 0.1, 0.1, 5, 0).is_err());
    }
}
