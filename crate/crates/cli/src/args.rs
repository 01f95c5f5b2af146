use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hybrid", version, about = "Dense and sparse retrieval toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an HNSW index from a JSON-lines dense-vector collection.
    IndexHnsw(IndexHnswArgs),
    /// Search an HNSW index with vector topics.
    SearchHnsw(SearchHnswArgs),
    /// Exact brute-force search over an index or a collection.
    SearchFlat(SearchFlatArgs),
    /// Build a BM25 inverted index from a JSON-lines text collection.
    IndexSparse(IndexSparseArgs),
    /// Search a BM25 index with text queries.
    SearchSparse(SearchSparseArgs),
    /// Fuse two or more run files.
    Fuse(FuseArgs),
    /// Evaluate a run file against relevance judgments.
    Eval(EvalArgs),
    /// Measure HNSW query throughput and latency.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct IndexHnswArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(short = 'M', long = "M", default_value_t = 16)]
    pub m: usize,
    #[arg(long = "efC", visible_alias = "ef-construction", default_value_t = 100)]
    pub ef_construction: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "cosine")]
    pub metric: String,
    /// Cap on documents per segment.
    #[arg(long)]
    pub segment_size: Option<usize>,
    /// Merge all segments into one after ingest.
    #[arg(long)]
    pub optimize: bool,
}

#[derive(Debug, Args)]
pub struct SearchHnswArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub topics: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub hits: usize,
    #[arg(long = "efSearch", visible_alias = "ef-search", default_value_t = 1000)]
    pub ef_search: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long = "topicfield", visible_alias = "topic-field", default_value = "vector")]
    pub topic_field: String,
    #[arg(long, default_value = "hnsw")]
    pub tag: String,
}

#[derive(Debug, Args)]
pub struct SearchFlatArgs {
    #[arg(long, conflicts_with = "collection", required_unless_present = "collection")]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub collection: Option<PathBuf>,
    /// Metric for `--collection` input; an index records its own.
    #[arg(long, default_value = "cosine")]
    pub metric: String,
    #[arg(long)]
    pub topics: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub hits: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long = "topicfield", visible_alias = "topic-field", default_value = "vector")]
    pub topic_field: String,
    #[arg(long, default_value = "flat")]
    pub tag: String,
}

#[derive(Debug, Args)]
pub struct IndexSparseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub index: PathBuf,
}

#[derive(Debug, Args)]
pub struct SearchSparseArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// `qid<TAB>text` lines or JSON-lines topics.
    #[arg(long, visible_alias = "queries")]
    pub topics: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub hits: usize,
    #[arg(long, default_value_t = 0.9)]
    pub k1: f64,
    #[arg(long, default_value_t = 0.4)]
    pub b: f64,
    #[arg(long = "topicfield", visible_alias = "topic-field", default_value = "text")]
    pub topic_field: String,
    #[arg(long, default_value = "bm25")]
    pub tag: String,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    /// Input run files.
    #[arg(required = true, num_args = 2..)]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// `rrf` or `linear`.
    #[arg(long, default_value = "rrf")]
    pub method: String,
    /// Weight of the first run under linear fusion.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long = "rrf-k", visible_alias = "rrf_k", default_value_t = 60)]
    pub rrf_k: u32,
    #[arg(long, default_value_t = 1000)]
    pub depth: usize,
    #[arg(long, default_value_t = 1000)]
    pub hits: usize,
    #[arg(long, default_value = "fused")]
    pub tag: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Comma-separated, e.g. `mrr@10,recall@1000,ndcg@10,ndcg_cut_10`.
    #[arg(long, default_value = "mrr@10,recall@1000,ndcg@10", value_delimiter = ',')]
    pub metrics: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub topics: PathBuf,
    #[arg(long = "efSearch", visible_alias = "ef-search", default_value_t = 100)]
    pub ef_search: usize,
    #[arg(long, default_value_t = 10)]
    pub hits: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = 1)]
    pub warmup: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long = "topicfield", visible_alias = "topic-field", default_value = "vector")]
    pub topic_field: String,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}
