//! Text signal extraction: tokenization, TF-IDF features, linear
//! classifiers, lexicon sentiment, LDA topic models, and evaluation metrics.

mod aspect;
mod checkpoint;
mod classifier;
mod eval;
mod lda;
mod lexicon;
mod tfidf;
mod tokenize;

pub use aspect::{aspect_sentiment, aspect_windows, AspectHit, AspectOntology};
pub use checkpoint::{load_checkpoint, save_checkpoint, TextClassifierCheckpoint};
pub use classifier::{
    logistic_loss_and_gradient, predict, train, ClassifierKind, LabelDistribution,
    LinearClassifier,
};
pub use eval::{evaluate, EvalReport};
pub use lda::{fit_lda, GibbsSampler, TopicModel};
pub use lexicon::{lexicon_sentiment, LexiconModel};
pub use tfidf::{fit_tfidf, SparseVec, TfIdfModel};
pub use tokenize::{tokenize, TokenSeq};

use thiserror::Error;

/// Errors raised by text-model operations.
#[derive(Debug, Error)]
pub enum TextModelError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("all documents are empty")]
    AllDocsEmpty,
    #[error("degenerate label set: need at least two classes, got {0}")]
    DegenerateLabels(usize),
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("labels length {labels} does not match feature rows {rows}")]
    LengthMismatch { labels: usize, rows: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("lexicon polarity {value} for token {token:?} outside [-1, 1]")]
    PolarityOutOfRange { token: String, value: f64 },
    #[error("malformed model checkpoint: {0}")]
    MalformedCheckpoint(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
