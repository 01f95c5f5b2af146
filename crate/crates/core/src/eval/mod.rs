//! Run files, relevance judgments, rank fusion and effectiveness metrics.

pub mod fusion;
pub mod metrics;
pub mod qrels;
pub mod run;

pub use fusion::{fuse, linear_fuse, rrf, FusionMethod, FusionParams};
pub use metrics::{mrr_at, ndcg_at, ndcg_at_with_gain, recall_at, Gain, MetricSpec};
pub use qrels::{load_qrels, parse_qrels, QrelsTable};
pub use run::{load_run, parse_run, write_run, RankedDoc, Ranking};
