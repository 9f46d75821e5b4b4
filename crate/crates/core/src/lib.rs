//! Geospatial social sensing toolkit.
//!
//! Turns raw social-media post corpora into spatially anchored, statistically
//! analyzable indicators. The library is organized as a pipeline of loosely
//! coupled modules:
//!
//! * [`corpus`] — JSONL ingestion, Boolean query filtering, deduplication.
//! * [`textmodel`] — tokenization, TF-IDF features, linear classifiers,
//!   lexicon sentiment, LDA topics, evaluation metrics.
//! * [`llm_extract`] — schema-validated structured extraction through an
//!   external LLM backend, with caching and a deterministic stub.
//! * [`geoanchor`] — gazetteer-based toponym resolution, point-in-polygon
//!   containment, and the five-strategy anchor precedence.
//! * [`aggregate`] — unit/time-bin indicator construction: means, the
//!   user-balanced acceptance index, damage indices, convergence detection.
//! * [`spatial`] — Pearson correlation, OLS, spatial weights, the Spatial
//!   Durbin Model by concentrated maximum likelihood, and Moran's I.

pub mod aggregate;
pub mod corpus;
// pub mod geoanchor;
// pub mod llm_extract;
pub mod spatial;
pub mod textmodel;
