//! Hierarchical navigable small-world graphs.
//!
//! Each node draws a top level from an exponentially decaying distribution and
//! appears in every layer from 0 up to that level. Searches enter at the top
//! layer's entry point, walk greedily down to layer 1, and finish with a
//! best-first beam over the dense layer 0.
//!
//! A graph is built by a single writer. Once built it is read-only and can be
//! searched from any number of threads.

mod graph;
mod level;
mod params;
mod select;

pub use graph::HnswGraph;
pub use level::{level_for_uniform, LevelGenerator};
pub use params::{BuildParams, SearchParams};
pub use select::{best_first, select_neighbors, Candidate};
