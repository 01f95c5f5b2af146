//! Dense and sparse retrieval in one crate.
//!
//! - [`vector`]: embeddings, similarity metrics, result ordering
//! - [`flat`]: exact brute-force search, the recall oracle
//! - [`hnsw`]: hierarchical navigable small-world graphs
//! - [`store`]: segmented on-disk HNSW indexes with merge-optimization
//! - [`sparse`]: BM25 over an in-memory inverted index
//! - [`eval`]: TREC run/qrels files, rank fusion, effectiveness metrics
//! - [`bench`]: query throughput measurement
//!
//! Vector math is generic over [`Scalar`] (`f32` or `f64`). The on-disk
//! segment format stores `f32`, and the aliases below fix that choice for the
//! common case.

pub mod bench;
pub mod collection;
pub mod error;
pub mod eval;
pub mod flat;
pub mod hnsw;
pub mod scalar;
pub mod sparse;
pub mod store;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use vector::{DenseVector, Metric, ScoredDoc};

/// `f32` embedding, the storage precision of index segments.
pub type Vector = DenseVector<f32>;
/// HNSW graph over `f32` vectors.
pub type Graph = hnsw::HnswGraph<f32>;
/// Exact index over `f32` vectors.
pub type Flat = flat::FlatIndex<f32>;
