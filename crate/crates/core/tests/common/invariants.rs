//! Randomized invariant suites. Each returns a one-line summary or the first
//! failure proptest found (already shrunk).

use std::collections::HashSet;

use hybrid_core::eval::{mrr_at, ndcg_at, ndcg_at_with_gain, recall_at, rrf, FusionParams, Gain, QrelsTable, Ranking};
use hybrid_core::flat::flat_search;
use hybrid_core::hnsw::{select_neighbors, BuildParams, Candidate, HnswGraph, SearchParams};
use hybrid_core::sparse::{bm25_idf, bm25_search, bm25_term_weight, build_inverted_index, tokenize, Bm25Params};
use hybrid_core::vector::{dot_slice, l2_norm, normalize, similarity};
use hybrid_core::{Metric, ScoredDoc, Vector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const VECTOR_CORE_CASES: u32 = 1000;
pub const SELECT_CASES: u32 = 1000;
pub const FUSION_CASES: u32 = 1000;
pub const METRIC_CASES: u32 = 1000;
pub const HNSW_GRAPHS: u32 = 100;
pub const SPARSE_CASES: u32 = 256;

type Suite = Result<String, String>;
type MetricFn<'a> = &'a dyn Fn(&Ranking) -> f64;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>, cases: u32, what: &str) -> Suite {
    r.map(|_| format!("{cases} cases: {what}")).map_err(|e| e.to_string())
}

fn raw_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, d)
}

fn nonzero_vec(d: usize) -> impl Strategy<Value = Vector> {
    raw_vec(d)
        .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| Vector::from_f64(&v).unwrap())
}

fn flat_case() -> impl Strategy<Value = (Vec<(String, Vector)>, Vector, usize, usize, Metric, u64)> {
    (1usize..12).prop_flat_map(|d| {
        (
            prop::collection::vec(nonzero_vec(d), 1..40),
            nonzero_vec(d),
            1usize..20,
            0usize..10,
            prop_oneof![Just(Metric::Dot), Just(Metric::Cosine)],
            any::<u64>(),
        )
            .prop_map(|(vs, q, k, extra, metric, shuffle)| {
                let corpus: Vec<(String, Vector)> = vs
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| (format!("d{i:02}"), metric.prepare(v).unwrap()))
                    .collect();
                (corpus, metric.prepare(q).unwrap(), k, extra, metric, shuffle)
            })
    })
}

/// Cosine bounds, normalization idempotence, dot symmetry, and flat-search
/// prefix consistency and permutation invariance.
pub fn vector_core(cases: u32) -> Suite {
    let mut r = runner(cases);
    let pair = (1usize..32).prop_flat_map(|d| (nonzero_vec(d), nonzero_vec(d)));
    let res = r.run(&pair, |(a, b)| {
        let na = normalize(&a).unwrap();
        let nb = normalize(&b).unwrap();
        let c = similarity(Metric::Cosine, &na, &nb).unwrap();
        prop_assert!((-1.0 - 1e-6..=1.0 + 1e-6).contains(&c), "cosine {c}");
        prop_assert!((l2_norm(&na) - 1.0).abs() < 1e-6);
        let twice = normalize(&na).unwrap();
        for (x, y) in twice.as_slice().iter().zip(na.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
        prop_assert_eq!(dot_slice(a.as_slice(), b.as_slice()), dot_slice(b.as_slice(), a.as_slice()));
        Ok(())
    });
    finish(res, cases, "")?;

    let mut r = runner(cases);
    let res = r.run(&flat_case(), |(corpus, q, k, extra, metric, shuffle)| {
        let short = flat_search(&corpus, &q, k, metric).unwrap();
        let long = flat_search(&corpus, &q, k + extra, metric).unwrap();
        prop_assert_eq!(short.len(), k.min(corpus.len()));
        prop_assert_eq!(&short[..], &long[..short.len()]);
        for w in long.windows(2) {
            prop_assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].docid < w[1].docid));
        }

        let mut shuffled = corpus.clone();
        let mut s = shuffle;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(flat_search(&shuffled, &q, k, metric).unwrap(), short);
        Ok(())
    });
    finish(
        res,
        cases,
        "cosine in [-1,1], normalize idempotent, flat prefix/permutation",
    )
}

fn select_case() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, usize)> {
    (2usize..8).prop_flat_map(|d| (prop::collection::vec(raw_vec(d), 0..40), raw_vec(d), 1usize..16))
}

/// `select_neighbors` never exceeds `m`, returns distinct members of the
/// candidate set, starts with the best candidate, and returns everything when
/// there are at most `m` candidates.
pub fn select(cases: u32) -> Suite {
    let mut r = runner(cases);
    let res = r.run(&select_case(), |(points, base, m)| {
        let cands: Vec<Candidate> = points
            .iter()
            .enumerate()
            .map(|(i, p)| Candidate::new(i as u32 * 3 + 1, dot_slice(p, &base)))
            .collect();
        let sim = |a: u32, b: u32| dot_slice(&points[(a / 3) as usize], &points[(b / 3) as usize]);
        let out = select_neighbors(&cands, m, sim);

        prop_assert!(out.len() <= m);
        prop_assert_eq!(out.len(), cands.len().min(m));
        let ids: HashSet<u32> = cands.iter().map(|c| c.id).collect();
        let distinct: HashSet<u32> = out.iter().copied().collect();
        prop_assert_eq!(distinct.len(), out.len());
        prop_assert!(out.iter().all(|id| ids.contains(id)));
        if let Some(best) = cands
            .iter()
            .max_by(|a, b| a.score.total_cmp(&b.score).then(b.id.cmp(&a.id)))
        {
            prop_assert_eq!(out[0], best.id);
        }
        if cands.len() <= m {
            let mut sorted = cands.clone();
            sorted.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.id.cmp(&b.id)));
            prop_assert_eq!(out, sorted.iter().map(|c| c.id).collect::<Vec<_>>());
        }
        Ok(())
    });
    finish(res, cases, "|N| <= M, N subset of C, distinct, best first")
}

fn run_strategy() -> impl Strategy<Value = Ranking> {
    prop::collection::vec(
        prop::collection::btree_map(0u32..30, -100.0f64..100.0, 1..20),
        1..4,
    )
    .prop_map(|queries| {
        let mut r = Ranking::new();
        for (q, docs) in queries.into_iter().enumerate() {
            let mut list: Vec<ScoredDoc> = docs
                .into_iter()
                .map(|(d, s)| ScoredDoc::new(format!("d{d:02}"), s))
                .collect();
            list.sort_by(hybrid_core::vector::rank_order);
            r.insert(format!("q{q}"), list);
        }
        r
    })
}

/// RRF depends only on ranks, is symmetric in its inputs, and fusing a run
/// with itself keeps its order.
pub fn fusion(cases: u32) -> Suite {
    let mut r = runner(cases);
    let strat = (run_strategy(), run_strategy(), run_strategy(), 1usize..25, 1u32..100);
    let res = r.run(&strat, |(a, b, c, depth, rrf_k)| {
        let p = FusionParams {
            depth,
            rrf_k,
            ..FusionParams::default()
        };
        let base = rrf(&[&a, &b, &c], &p).unwrap();

        let scaled = a.map_scores(|s| 2.0 * s + 1.0);
        let warped = b.map_scores(|s| s.exp());
        prop_assert_eq!(&rrf(&[&scaled, &warped, &c], &p).unwrap(), &base);

        for order in [[&c, &b, &a], [&b, &a, &c], [&a, &c, &b]] {
            let other = rrf(&order, &p).unwrap();
            prop_assert_eq!(other.qids().collect::<Vec<_>>(), base.qids().collect::<Vec<_>>());
            prop_assert_eq!(&other, &base);
        }

        let selfed = rrf(&[&a, &a], &p).unwrap();
        for (qid, docs) in a.iter() {
            let fused: Vec<&str> = selfed.get(qid).unwrap().iter().map(|d| d.docid.as_str()).collect();
            let head: Vec<&str> = docs.iter().take(depth).map(|d| d.docid.as_str()).collect();
            prop_assert_eq!(fused, head);
        }
        Ok(())
    });
    finish(res, cases, "rank-only, input-order symmetric, self-fusion order-preserving")
}

fn qrels_strategy() -> impl Strategy<Value = QrelsTable> {
    prop::collection::vec(prop::collection::btree_map(0u32..30, 0u32..4, 0..12), 1..5).prop_map(|qs| {
        let mut t = QrelsTable::new();
        for (q, docs) in qs.into_iter().enumerate() {
            for (d, g) in docs {
                t.insert(format!("q{q}"), format!("d{d:02}"), g).unwrap();
            }
        }
        t
    })
}

/// MRR, Recall and nDCG lie in [0, 1] and are unchanged by `s -> 2s + 1`.
pub fn metrics(cases: u32) -> Suite {
    let mut r = runner(cases);
    let res = r.run(&(run_strategy(), qrels_strategy(), 1usize..25), |(run, qrels, k)| {
        let shifted = run.map_scores(|s| 2.0 * s + 1.0);
        let fns: [(&str, MetricFn); 4] = [
            ("mrr", &|x| mrr_at(x, &qrels, k)),
            ("recall", &|x| recall_at(x, &qrels, k)),
            ("ndcg", &|x| ndcg_at(x, &qrels, k)),
            ("ndcg_lin", &|x| ndcg_at_with_gain(x, &qrels, k, Gain::Linear)),
        ];
        for (name, f) in fns {
            let v = f(&run);
            prop_assert!((0.0..=1.0).contains(&v), "{name} = {v}");
            prop_assert_eq!(v, f(&shifted), "{} changed under 2s+1", name);
        }
        Ok(())
    });
    finish(res, cases, "values in [0,1], invariant under s -> 2s+1")
}

fn graph_case() -> impl Strategy<Value = (usize, usize, usize, usize, u64, Metric, u64)> {
    (1usize..250, 2usize..12, 2usize..10).prop_flat_map(|(n, d, m)| {
        (
            Just(n),
            Just(d),
            Just(m),
            m..(m + 40),
            any::<u64>(),
            prop_oneof![Just(Metric::Dot), Just(Metric::Cosine)],
            any::<u64>(),
        )
    })
}

fn build_graph(n: usize, d: usize, params: BuildParams, data_seed: u64) -> HnswGraph<f32> {
    let vectors = super::unit_vectors(n, d, data_seed);
    let mut g = HnswGraph::new(params).unwrap();
    for (i, v) in vectors.into_iter().enumerate() {
        // Scale so dot-product graphs see non-unit norms.
        let scaled: Vec<f32> = v.as_slice().iter().map(|x| x * (1.0 + (i % 5) as f32)).collect();
        g.insert(format!("n{i}"), Vector::new(scaled).unwrap()).unwrap();
    }
    g
}

/// Structure of randomly built graphs: degree caps, no self loops or
/// duplicate links, links only between nodes present on that layer, entry
/// point on the top layer, and identical graphs from identical seeds.
pub fn hnsw_graphs(graphs: u32) -> Suite {
    let mut r = runner(graphs);
    let res = r.run(&graph_case(), |(n, d, m, ef_c, seed, metric, data_seed)| {
        let params = BuildParams::new(m, ef_c, seed, metric).unwrap();
        let g = build_graph(n, d, params, data_seed);
        prop_assert_eq!(g.len(), n);
        let ep = g.entry_point().unwrap();
        let top = (0..n as u32).map(|v| g.node_level(v)).max().unwrap();
        prop_assert_eq!(g.max_level(), top);
        prop_assert_eq!(g.node_level(ep), top);

        for v in 0..n as u32 {
            for layer in 0..=g.node_level(v) {
                let nb = g.neighbors(v, layer);
                prop_assert!(nb.len() <= params.max_links(layer), "degree {} > cap at layer {layer}", nb.len());
                prop_assert!(!nb.contains(&v), "self loop at {v}");
                let distinct: HashSet<u32> = nb.iter().copied().collect();
                prop_assert_eq!(distinct.len(), nb.len());
                for &u in nb {
                    prop_assert!((u as usize) < n && g.node_level(u) >= layer);
                }
            }
        }

        let again = build_graph(n, d, params, data_seed);
        prop_assert_eq!(again.links(), g.links());
        prop_assert_eq!(again.entry_point(), g.entry_point());

        let q = Vector::new(g.vector(0).to_vec()).unwrap();
        let k = 5.min(n);
        let hits = g.knn_search(&q, SearchParams::new(n.max(k), k).unwrap()).unwrap();
        prop_assert!(!hits.is_empty() && hits.len() <= k);
        for w in hits.windows(2) {
            prop_assert!(w[0].score >= w[1].score);
        }
        prop_assert_eq!(&hits, &again.knn_search(&q, SearchParams::new(n.max(k), k).unwrap()).unwrap());
        Ok(())
    });
    finish(res, graphs, "degree caps, no self/duplicate links, layer membership, seed determinism")
}

fn corpus_strategy() -> impl Strategy<Value = Vec<String>> {
    let word = prop::sample::select(vec!["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"]);
    prop::collection::vec(prop::collection::vec(word, 1..15).prop_map(|w| w.join(" ")), 1..25)
}

/// BM25 search agrees with direct term-weight sums, and the weight grows with
/// tf and shrinks with document length and document frequency.
pub fn sparse(cases: u32) -> Suite {
    let mut r = runner(cases);
    let strat = (corpus_strategy(), prop::collection::vec(0usize..8, 1..4), 0.1f64..3.0, 0.0f64..1.0);
    let res = r.run(&strat, |(texts, qterms, k1, b)| {
        let words = ["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"];
        let query: Vec<&str> = qterms.iter().map(|&i| words[i]).collect();
        let query = query.join(" ");
        let docs: Vec<(String, &str)> = texts.iter().enumerate().map(|(i, t)| (format!("t{i}"), t.as_str())).collect();
        let idx = build_inverted_index(docs.clone()).unwrap();
        let p = Bm25Params::new(k1, b).unwrap();
        let n = idx.num_docs() as f64;

        let got = bm25_search(&idx, &query, idx.num_docs(), p).unwrap();
        let mut expected = Vec::new();
        for (i, (id, text)) in docs.iter().enumerate() {
            let toks = tokenize(text);
            let mut score = 0.0;
            let mut matched = false;
            for term in tokenize(&query) {
                let tf = toks.iter().filter(|t| **t == term).count();
                if tf > 0 {
                    matched = true;
                    score += bm25_term_weight(
                        tf as f64,
                        idx.df(&term) as f64,
                        idx.doc_len(i as u32) as f64,
                        idx.avgdl(),
                        n,
                        k1,
                        b,
                    );
                }
            }
            if matched {
                expected.push((id.as_str(), score));
            }
        }
        prop_assert_eq!(got.len(), expected.len());
        for g in &got {
            let (_, s) = expected.iter().find(|(id, _)| *id == g.docid).unwrap();
            prop_assert!((g.score - s).abs() <= 1e-9);
        }
        Ok(())
    });
    finish(res, cases, "")?;

    let mut r = runner(cases);
    let strat = (1u32..50, 1u32..100, 1u32..100, 1.0f64..50.0, 0.1f64..3.0, 0.01f64..1.0);
    let res = r.run(&strat, |(tf, df, extra, avgdl, k1, b)| {
        let n = (df + extra) as f64;
        let (tf, df) = (tf as f64, df as f64);
        let w = |tf: f64, df: f64, dl: f64| bm25_term_weight(tf, df, dl, avgdl, n, k1, b);
        prop_assert!(w(tf + 1.0, df, 10.0) > w(tf, df, 10.0));
        prop_assert!(w(tf, df, 10.0) > w(tf, df, 20.0));
        if df < n {
            prop_assert!(bm25_idf(df + 1.0, n) < bm25_idf(df, n));
        }
        prop_assert!(bm25_idf(df, n) > 0.0);
        Ok(())
    });
    finish(res, cases, "exhaustive scores match term sums to 1e-9; monotone in tf, dl, df")
}
