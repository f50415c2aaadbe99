//! Stress-based graph drawing with low-rank resistance distance embeddings.
//!
//! The pipeline has three stages: a sparse eigensolver computes the smallest
//! non-zero Laplacian eigenpairs ([`rdmds`]), their scaled eigenvectors give a
//! Euclidean embedding whose distances are square roots of low-rank resistance
//! distances, and a sampled stochastic gradient descent ([`layout`]) optimizes
//! a 2D layout against those ideal distances. [`distances`] provides
//! shortest-path baselines and a dense resistance oracle, [`metrics`] the
//! layout faithfulness measures, and [`experiments`] the comparison harness.

pub mod distances;
pub mod experiments;
pub mod graph;
pub mod layout;
pub mod metrics;
pub mod rdmds;
pub mod sparse;

/// Crate-wide error type.
///
/// Variants map onto the CLI exit codes: invalid input (1), numerical
/// failure (2), cap/limit violation (3).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
