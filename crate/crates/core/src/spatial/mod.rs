//! Validation and spatial inference: Pearson correlation, OLS, spatial
//! weights construction, the Spatial Durbin Model by concentrated maximum
//! likelihood, and Moran's I.

mod correlate;
mod moran;
mod ols;
mod sdm;
mod weights;

pub use correlate::{pearson, SeriesPair};
pub use moran::moran_i;
pub use ols::{ols_fit, OlsFit};
pub use sdm::{
    concentrated_log_likelihood, log_det_i_minus_rho_w, sdm_fit, SdmConvergence, SdmFit,
    SdmOptions,
};
pub use weights::{
    build_weights, read_edge_list_csv, Centroid, WeightsBuild, WeightsMatrix, WeightsSpec,
};

use thiserror::Error;

/// Errors raised by spatial-statistics operations.
#[derive(Debug, Error)]
pub enum SpatialError {
    #[error("zero variance: series is constant")]
    ZeroVariance,
    #[error("insufficient overlap: only {joined} units joined, need at least 3")]
    InsufficientOverlap { joined: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank deficiency: design column {column} is linearly dependent")]
    RankDeficient { column: usize },
    #[error("too few observations: n={n} with {params} parameters")]
    TooFewObservations { n: usize, params: usize },
    #[error("weights matrix is not row-standardized")]
    NotRowStandardized,
    #[error("boundary solution: rho optimum at the admissible interval edge")]
    BoundarySolution,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
