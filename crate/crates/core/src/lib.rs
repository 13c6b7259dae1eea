//! Community detection for sparse directed stochastic block models.
//!
//! The crate covers the whole simulation pipeline: sampling graphs from a
//! block model ([`graph_model`]), estimating the edge-probability matrix by
//! neighbourhood smoothing ([`estimator`]), clustering the estimated rows
//! with K-means ([`clustering`]), the spectral and d-score comparison
//! methods ([`baselines`]), partition metrics ([`metrics`]), closed-form
//! concentration bounds ([`theory`]) and the Monte-Carlo driver
//! ([`harness`]).

pub mod baselines;
pub mod clustering;
pub mod error;
pub mod estimator;
pub mod fmt;
pub mod graph_model;
pub mod harness;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use graph_model::{AdjacencyMatrix, BlockMatrix, CommunityProbs, LabelVector, ProbabilityMatrix};
pub use matrix::DenseMatrix;
