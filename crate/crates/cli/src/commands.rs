use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use hybrid_core::bench::{run_bench, BenchReport, QueryPool};
use hybrid_core::collection::{read_dense_collection, read_text_collection, read_text_queries, read_vector_topics};
use hybrid_core::eval::{fuse, load_qrels, load_run, write_run, FusionMethod, FusionParams, MetricSpec, Ranking};
use hybrid_core::hnsw::{BuildParams, SearchParams};
use hybrid_core::sparse::{bm25_search, build_inverted_index, Bm25Params, InvertedIndex};
use hybrid_core::store::{index_size_bytes, ingest, optimize, Index, IngestOptions};
use hybrid_core::{Flat, Metric, ScoredDoc, Vector};

use crate::args::*;
use crate::UsageError;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_metric(s: &str) -> Result<Metric> {
    s.parse().map_err(|e: hybrid_core::Error| usage(e.to_string()))
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(usage(format!("{name} must be >= 1")));
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::IndexHnsw(a) => index_hnsw(a),
        Command::SearchHnsw(a) => search_hnsw(a),
        Command::SearchFlat(a) => search_flat(a),
        Command::IndexSparse(a) => index_sparse(a),
        Command::SearchSparse(a) => search_sparse(a),
        Command::Fuse(a) => fuse_runs(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench(a),
    }
}

fn index_hnsw(a: IndexHnswArgs) -> Result<()> {
    let metric = parse_metric(&a.metric)?;
    let params = BuildParams::new(a.m, a.ef_construction, a.seed, metric).map_err(|e| usage(e.to_string()))?;
    positive("threads", a.threads)?;
    if a.segment_size == Some(0) {
        return Err(usage("segment-size must be >= 1"));
    }

    let start = Instant::now();
    let docs = read_dense_collection(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let opts = IngestOptions {
        threads: a.threads,
        segment_size: a.segment_size,
    };
    let mut manifest = ingest(docs, params, opts, &a.index)?;
    if a.optimize {
        manifest = optimize(&a.index, params, a.threads)?;
    }
    let secs = start.elapsed().as_secs_f64();
    println!("documents\t{}", manifest.doc_count());
    println!("segments\t{}", manifest.segments.len());
    println!("wall_seconds\t{secs:.3}");
    println!("index_size_bytes\t{}", index_size_bytes(&a.index)?);
    Ok(())
}

/// Checks every topic against the index dimension before any search runs.
fn check_dims(topics: &[(String, Vector)], dim: usize) -> Result<()> {
    for (qid, v) in topics {
        if v.dim() != dim {
            bail!("topic {qid}: dimension {} does not match index dimension {dim}", v.dim());
        }
    }
    Ok(())
}

fn to_ranking(topics: &[(String, Vector)], results: Vec<Vec<ScoredDoc>>) -> Ranking {
    let mut run = Ranking::new();
    for ((qid, _), docs) in topics.iter().zip(results) {
        run.insert(qid.clone(), docs);
    }
    run
}

fn search_hnsw(a: SearchHnswArgs) -> Result<()> {
    positive("hits", a.hits)?;
    positive("threads", a.threads)?;
    let mut ef = a.ef_search;
    if ef < a.hits {
        eprintln!("warning: efSearch {ef} is below hits {}; raising efSearch to {}", a.hits, a.hits);
        ef = a.hits;
    }
    let params = SearchParams::new(ef, a.hits).map_err(|e| usage(e.to_string()))?;
    let index = Index::open(&a.index).with_context(|| format!("opening {}", a.index.display()))?;
    let topics = read_vector_topics(&a.topics, &a.topic_field, index.metric())?;
    check_dims(&topics, index.dim())?;

    let pool = QueryPool::new(a.threads)?;
    let results = pool
        .map(&topics, |(_, q)| index.search(q, params))
        .into_iter()
        .collect::<hybrid_core::Result<Vec<_>>>()?;
    write_run(&to_ranking(&topics, results), &a.tag, &a.output)?;
    Ok(())
}

fn search_flat(a: SearchFlatArgs) -> Result<()> {
    positive("hits", a.hits)?;
    positive("threads", a.threads)?;
    let pool = QueryPool::new(a.threads)?;
    let (topics, results) = if let Some(dir) = &a.index {
        let index = Index::open(dir).with_context(|| format!("opening {}", dir.display()))?;
        let topics = read_vector_topics(&a.topics, &a.topic_field, index.metric())?;
        check_dims(&topics, index.dim())?;
        let results = pool.map(&topics, |(_, q)| index.exact_search(q, a.hits));
        (topics, results)
    } else {
        let path = a.collection.as_ref().expect("clap requires --index or --collection");
        let metric = parse_metric(&a.metric)?;
        let mut flat: Option<Flat> = None;
        for doc in read_dense_collection(path)? {
            let (id, v) = doc?;
            flat.get_or_insert_with(|| Flat::new(metric, v.dim())).add(id, v)?;
        }
        let flat = flat.ok_or(hybrid_core::Error::EmptyCorpus)?;
        let topics = read_vector_topics(&a.topics, &a.topic_field, metric)?;
        check_dims(&topics, flat.dim())?;
        let results = pool.map(&topics, |(_, q)| flat.search(q, a.hits));
        (topics, results)
    };
    let results = results.into_iter().collect::<hybrid_core::Result<Vec<_>>>()?;
    write_run(&to_ranking(&topics, results), &a.tag, &a.output)?;
    Ok(())
}

fn index_sparse(a: IndexSparseArgs) -> Result<()> {
    let start = Instant::now();
    let docs = read_text_collection(&a.input)?.collect::<hybrid_core::Result<Vec<_>>>()?;
    let idx = build_inverted_index(docs)?;
    idx.save(&a.index)?;
    println!("documents\t{}", idx.num_docs());
    println!("terms\t{}", idx.num_terms());
    println!("wall_seconds\t{:.3}", start.elapsed().as_secs_f64());
    println!("index_size_bytes\t{}", index_size_bytes(&a.index)?);
    Ok(())
}

fn search_sparse(a: SearchSparseArgs) -> Result<()> {
    positive("hits", a.hits)?;
    let p = Bm25Params::new(a.k1, a.b).map_err(|e| usage(e.to_string()))?;
    let idx = InvertedIndex::load(&a.index).with_context(|| format!("opening {}", a.index.display()))?;
    let queries = read_text_queries(&a.topics, &a.topic_field)?;
    let mut run = Ranking::new();
    for (qid, text) in &queries {
        run.insert(qid.clone(), bm25_search(&idx, text, a.hits, p)?);
    }
    write_run(&run, &a.tag, &a.output)?;
    Ok(())
}

fn fuse_runs(a: FuseArgs) -> Result<()> {
    positive("hits", a.hits)?;
    let method: FusionMethod = a.method.parse().map_err(|e: hybrid_core::Error| usage(e.to_string()))?;
    let p = FusionParams {
        method,
        rrf_k: a.rrf_k,
        alpha: a.alpha,
        depth: a.depth,
    };
    p.validate().map_err(|e| usage(e.to_string()))?;
    if method == FusionMethod::Linear && a.runs.len() != 2 {
        return Err(usage(format!("linear fusion takes two runs, got {}", a.runs.len())));
    }
    let runs = a
        .runs
        .iter()
        .map(|r| load_run(r, false))
        .collect::<hybrid_core::Result<Vec<_>>>()?;
    let refs: Vec<&Ranking> = runs.iter().collect();
    let fused = fuse(&refs, &p)?;
    let mut out = Ranking::new();
    for (qid, docs) in fused.iter() {
        out.insert(
            qid,
            docs.iter().take(a.hits).map(|d| ScoredDoc::new(d.docid.clone(), d.score)).collect(),
        );
    }
    write_run(&out, &a.tag, &a.output)?;
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let specs = a
        .metrics
        .iter()
        .map(|m| m.trim().parse::<MetricSpec>().map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let run = load_run(&a.run, false)?;
    let qrels = load_qrels(&a.qrels)?;
    for (name, spec) in a.metrics.iter().zip(&specs) {
        println!("{}\t{:.4}", name.trim(), spec.evaluate(&run, &qrels));
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    positive("hits", a.hits)?;
    positive("threads", a.threads)?;
    positive("repeats", a.repeats)?;
    let ef = a.ef_search.max(a.hits);
    let params = SearchParams::new(ef, a.hits).map_err(|e| usage(e.to_string()))?;
    let index = Index::open(&a.index).with_context(|| format!("opening {}", a.index.display()))?;
    let topics = read_vector_topics(&a.topics, &a.topic_field, index.metric())?;
    check_dims(&topics, index.dim())?;
    if topics.is_empty() {
        bail!("{} holds no topics", a.topics.display());
    }
    let queries: Vec<&Vector> = topics.iter().map(|(_, v)| v).collect();

    let pool = QueryPool::new(a.threads)?;
    let (latencies, wall) = run_bench(&pool, &queries, a.warmup, a.repeats, |q| index.search(q, params));
    let report = BenchReport::from_measurements(&latencies, wall, a.threads, ef, a.index.display().to_string());
    println!("{}", report.to_json());
    print!("{report}");
    if let Some(path) = &a.report {
        write_text(path, &(report.to_json() + "\n"))?;
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
