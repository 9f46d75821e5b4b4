//! Linear text classifiers over sparse feature vectors.
//!
//! Both kinds share one prediction rule, `softmax(W v + b)`:
//!
//! * multinomial naive Bayes trains in closed form with Laplace smoothing
//!   (lambda = 1), storing log conditional probabilities as weights and log
//!   priors as biases;
//! * logistic regression minimizes the multinomial cross-entropy plus an L2
//!   penalty (lambda = 1e-4, bias unpenalized) by gradient descent with
//!   backtracking line search until the gradient infinity-norm drops below
//!   1e-6 or 500 epochs elapse.
//!
//! Training is deterministic: weights start at zero and examples are visited
//! in input order, so no seed is consumed.

use serde::{Deserialize, Serialize};

use super::{SparseVec, TextModelError};

const L2_LAMBDA: f64 = 1e-4;
const GRAD_TOL: f64 = 1e-6;
const MAX_EPOCHS: usize = 500;

/// Which training rule produced a [`LinearClassifier`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "multinomial-naive-bayes")]
    MultinomialNaiveBayes,
    #[serde(rename = "logistic-regression")]
    LogisticRegression,
}

/// A trained linear model: per-class weight vectors plus biases.
#[derive(Debug, Clone)]
pub struct LinearClassifier {
    kind: ClassifierKind,
    classes: Vec<String>,
    /// weights[class][feature]
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl LinearClassifier {
    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    /// Class labels in score order (ties in prediction break toward the
    /// earliest).
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn feature_dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn from_parts(
        kind: ClassifierKind,
        classes: Vec<String>,
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
    ) -> Self {
        Self {
            kind,
            classes,
            weights,
            bias,
        }
    }
}

/// A probability distribution over the classifier's labels.
#[derive(Debug, Clone)]
pub struct LabelDistribution {
    classes: Vec<String>,
    probs: Vec<f64>,
}

impl LabelDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// The predicted label: highest probability, earliest class on ties.
    pub fn argmax(&self) -> &str {
        let mut best = 0;
        for i in 1..self.probs.len() {
            if self.probs[i] > self.probs[best] {
                best = i;
            }
        }
        &self.classes[best]
    }

    pub fn prob_of(&self, class: &str) -> Option<f64> {
        self.classes
            .iter()
            .position(|c| c == class)
            .map(|i| self.probs[i])
    }
}

/// Trains a classifier of the given kind on sparse features and labels.
pub fn train(
    kind: ClassifierKind,
    features: &[SparseVec],
    labels: &[String],
) -> Result<LinearClassifier, TextModelError> {
    if features.len() != labels.len() {
        return Err(TextModelError::LengthMismatch {
            labels: labels.len(),
            rows: features.len(),
        });
    }
    if features.is_empty() {
        return Err(TextModelError::EmptyCorpus);
    }
    let dim = features[0].dim();
    if let Some(bad) = features.iter().find(|f| f.dim() != dim) {
        return Err(TextModelError::DimensionMismatch {
            expected: dim,
            got: bad.dim(),
        });
    }

    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(TextModelError::DegenerateLabels(classes.len()));
    }
    let class_of: Vec<usize> = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label in class list"))
        .collect();

    let (weights, bias) = match kind {
        ClassifierKind::MultinomialNaiveBayes => train_nb(features, &class_of, classes.len(), dim),
        ClassifierKind::LogisticRegression => train_logreg(features, &class_of, classes.len(), dim),
    };

    Ok(LinearClassifier {
        kind,
        classes,
        weights,
        bias,
    })
}

/// Predicts `softmax(W v + b)` for one feature vector.
pub fn predict(
    model: &LinearClassifier,
    v: &SparseVec,
) -> Result<LabelDistribution, TextModelError> {
    if v.dim() != model.feature_dim() {
        return Err(TextModelError::DimensionMismatch {
            expected: model.feature_dim(),
            got: v.dim(),
        });
    }
    let logits: Vec<f64> = model
        .weights
        .iter()
        .zip(&model.bias)
        .map(|(w, b)| b + v.entries().iter().map(|&(i, x)| w[i] * x).sum::<f64>())
        .collect();
    Ok(LabelDistribution {
        classes: model.classes.clone(),
        probs: softmax(&logits),
    })
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn train_nb(
    features: &[SparseVec],
    class_of: &[usize],
    n_classes: usize,
    dim: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut token_counts = vec![vec![0.0f64; dim]; n_classes];
    let mut class_totals = vec![0.0f64; n_classes];
    let mut class_docs = vec![0usize; n_classes];

    for (v, &c) in features.iter().zip(class_of) {
        class_docs[c] += 1;
        for &(i, x) in v.entries() {
            token_counts[c][i] += x;
            class_totals[c] += x;
        }
    }

    let n = features.len() as f64;
    let weights = token_counts
        .iter()
        .zip(&class_totals)
        .map(|(counts, &total)| {
            counts
                .iter()
                .map(|&ct| ((ct + 1.0) / (total + dim as f64)).ln())
                .collect()
        })
        .collect();
    let bias = class_docs.iter().map(|&d| (d as f64 / n).ln()).collect();
    (weights, bias)
}

/// Multinomial cross-entropy loss and gradient for logistic regression.
///
/// `params` is the flat parameter vector `[W row-major (classes x dim), b]`.
/// The loss is the mean negative log-likelihood plus `lambda/2 * ||W||^2`
/// (biases are not penalized). Exposed so the gradient can be checked
/// against finite differences.
pub fn logistic_loss_and_gradient(
    params: &[f64],
    features: &[SparseVec],
    class_of: &[usize],
    n_classes: usize,
    dim: usize,
    lambda: f64,
) -> (f64, Vec<f64>) {
    assert_eq!(params.len(), n_classes * dim + n_classes);
    let (w, b) = params.split_at(n_classes * dim);
    let n = features.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0f64; params.len()];

    for (v, &y) in features.iter().zip(class_of) {
        let logits: Vec<f64> = (0..n_classes)
            .map(|c| {
                b[c] + v
                    .entries()
                    .iter()
                    .map(|&(i, x)| w[c * dim + i] * x)
                    .sum::<f64>()
            })
            .collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = max + logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
        loss -= (logits[y] - log_sum) / n;

        for c in 0..n_classes {
            let p = (logits[c] - log_sum).exp();
            let residual = p - if c == y { 1.0 } else { 0.0 };
            for &(i, x) in v.entries() {
                grad[c * dim + i] += residual * x / n;
            }
            grad[n_classes * dim + c] += residual / n;
        }
    }

    for c in 0..n_classes {
        for i in 0..dim {
            loss += 0.5 * lambda * w[c * dim + i] * w[c * dim + i];
            grad[c * dim + i] += lambda * w[c * dim + i];
        }
    }

    (loss, grad)
}

fn train_logreg(
    features: &[SparseVec],
    class_of: &[usize],
    n_classes: usize,
    dim: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut params = vec![0.0f64; n_classes * dim + n_classes];
    let (mut loss, mut grad) =
        logistic_loss_and_gradient(&params, features, class_of, n_classes, dim, L2_LAMBDA);
    let mut step = 1.0;

    for _ in 0..MAX_EPOCHS {
        let grad_inf = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_inf < GRAD_TOL {
            break;
        }
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum();

        // Backtracking line search (Armijo condition).
        step *= 2.0;
        loop {
            let trial: Vec<f64> = params
                .iter()
                .zip(&grad)
                .map(|(p, g)| p - step * g)
                .collect();
            let (trial_loss, trial_grad) =
                logistic_loss_and_gradient(&trial, features, class_of, n_classes, dim, L2_LAMBDA);
            if trial_loss <= loss - 0.5 * step * grad_sq || step < 1e-12 {
                params = trial;
                loss = trial_loss;
                grad = trial_grad;
                break;
            }
            step *= 0.5;
        }
    }

    let bias = params[n_classes * dim..].to_vec();
    let weights = (0..n_classes)
        .map(|c| params[c * dim..(c + 1) * dim].to_vec())
        .collect();
    (weights, bias)
}
