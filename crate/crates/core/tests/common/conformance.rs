//! Checks against frozen reference values in `tests/fixtures`.

use std::collections::{BTreeMap, BTreeSet};

use hybrid_core::collection::{read_text_collection, read_text_queries};
use hybrid_core::eval::{
    self, linear_fuse, load_qrels, load_run, mrr_at, ndcg_at, ndcg_at_with_gain, recall_at, rrf, FusionMethod,
    FusionParams, Gain, Ranking,
};
use hybrid_core::sparse::{bm25_search, bm25_term_weight, build_inverted_index, Bm25Params};
use hybrid_core::ScoredDoc;
use rand::{Rng, SeedableRng};

use super::fixture;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn read_tsv(name: &str) -> Vec<Vec<String>> {
    std::fs::read_to_string(fixture(name))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

/// Every term weight and every ranking of the 5-document fixture.
pub fn bm25_fixture() -> Check {
    let docs: Vec<(String, String)> = read_text_collection(&fixture("bm25_docs.jsonl"))
        .unwrap()
        .collect::<Result<_, _>>()
        .unwrap();
    let idx = build_inverted_index(docs.clone()).map_err(|e| e.to_string())?;
    let p = Bm25Params::new(0.9, 0.4).unwrap();

    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("bm25_stats.json")).unwrap()).unwrap();
    ensure((idx.avgdl() - stats["avgdl"].as_f64().unwrap()).abs() < 1e-12, || "avgdl differs".into())?;
    ensure(idx.num_docs() as u64 == stats["N"].as_u64().unwrap(), || "N differs".into())?;
    for (term, df) in stats["df"].as_object().unwrap() {
        ensure(idx.df(term) as u64 == df.as_u64().unwrap(), || format!("df({term}) differs"))?;
    }
    ensure(idx.num_terms() == stats["df"].as_object().unwrap().len(), || "lexicon size differs".into())?;

    let mut weights = 0;
    let mut max_err: f64 = 0.0;
    for row in read_tsv("bm25_weights.tsv") {
        let (term, docid) = (&row[0], &row[1]);
        let tf: u32 = row[2].parse().unwrap();
        let expected: f64 = row[5].parse().unwrap();
        ensure(idx.tf(term, docid) == tf, || format!("tf({term},{docid}) differs"))?;
        let dl = docs.iter().position(|d| &d.0 == docid).map(|i| idx.doc_len(i as u32)).unwrap();
        let w = bm25_term_weight(
            tf as f64,
            idx.df(term) as f64,
            dl as f64,
            idx.avgdl(),
            idx.num_docs() as f64,
            p.k1,
            p.b,
        );
        max_err = max_err.max((w - expected).abs());
        weights += 1;
    }
    ensure(max_err <= 1e-6, || format!("term weight error {max_err:e}"))?;

    let mut expected: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for row in read_tsv("bm25_rankings.tsv") {
        expected.entry(row[0].clone()).or_default().push((row[1].clone(), row[3].parse().unwrap()));
    }
    let queries = read_text_queries(&fixture("bm25_queries.tsv"), "text").unwrap();
    for (qid, text) in &queries {
        let got = bm25_search(&idx, text, 10, p).map_err(|e| e.to_string())?;
        let want = &expected[qid];
        ensure(got.len() == want.len(), || format!("{qid}: {} results, expected {}", got.len(), want.len()))?;
        for (g, (d, s)) in got.iter().zip(want) {
            ensure(&g.docid == d && (g.score - s).abs() <= 1e-6, || {
                format!("{qid}: got ({}, {}), expected ({d}, {s})", g.docid, g.score)
            })?;
        }
    }
    Ok(format!("{weights} term weights (max err {max_err:.1e}), {} rankings", queries.len()))
}

/// MRR@10, Recall@1k and nDCG@10 against trec_eval output.
pub fn metrics_fixture() -> Check {
    let run = load_run(&fixture("metrics_run.trec"), true).map_err(|e| e.to_string())?;
    let qrels = load_qrels(&fixture("metrics_qrels.txt")).map_err(|e| e.to_string())?;
    let reference: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("metrics_reference.json")).unwrap()).unwrap();
    let r = |k: &str| reference[k].as_f64().unwrap();

    let rows = [
        ("MRR@10 vs recip_rank", mrr_at(&run, &qrels, 10), r("recip_rank@10")),
        ("Recall@1k vs recall_1000", recall_at(&run, &qrels, 1000), r("recall_1000")),
        ("nDCG@10 (linear gain) vs ndcg_cut_10", ndcg_at_with_gain(&run, &qrels, 10, Gain::Linear), r("ndcg_cut_10")),
        ("nDCG@10 (exponential gain) vs direct formula", ndcg_at(&run, &qrels, 10), r("ndcg_exp@10")),
    ];
    let mut parts = Vec::new();
    for (name, got, want) in rows {
        ensure((got - want).abs() <= 1e-4, || format!("{name}: {got:.6} vs {want:.6}"))?;
        parts.push(format!("{got:.4}"));
    }
    Ok(format!("10 queries; mrr/recall/ndcg_lin/ndcg_exp = {}", parts.join("/")))
}

fn synthetic_run(seed: u64, queries: usize, depth: usize, pool: usize) -> Ranking {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut r = Ranking::new();
    for q in 0..queries {
        let mut ids: Vec<usize> = (0..pool).collect();
        for i in (1..ids.len()).rev() {
            ids.swap(i, rng.gen_range(0..=i));
        }
        let mut score = 50.0;
        let docs = ids[..depth]
            .iter()
            .map(|d| {
                score -= rng.gen_range(0.0..1.0);
                ScoredDoc::new(format!("d{d:03}"), score)
            })
            .collect();
        r.insert(format!("q{q}"), docs);
    }
    r
}

/// RRF and linear fusion against brute-force score tables.
pub fn fusion_fixture() -> Check {
    let a = synthetic_run(1, 5, 100, 150);
    let b = synthetic_run(2, 5, 100, 150);

    let p = FusionParams::default();
    let fused = rrf(&[&a, &b], &p).map_err(|e| e.to_string())?;
    let lin_p = FusionParams {
        method: FusionMethod::Linear,
        alpha: 0.3,
        ..p
    };
    let lin = linear_fuse(&a, &b, &lin_p).map_err(|e| e.to_string())?;

    for q in 0..5 {
        let qid = format!("q{q}");
        let ra = a.get(&qid).unwrap();
        let rb = b.get(&qid).unwrap();
        let universe: BTreeSet<&str> = ra.iter().chain(rb).map(|d| d.docid.as_str()).collect();

        // RRF table
        let mut table: Vec<(f64, &str)> = universe
            .iter()
            .map(|&d| {
                let mut s = 0.0;
                if let Some(x) = ra.iter().find(|x| x.docid == d) {
                    s += 1.0 / (60.0 + x.rank as f64);
                }
                if let Some(x) = rb.iter().find(|x| x.docid == d) {
                    s += 1.0 / (60.0 + x.rank as f64);
                }
                (s, d)
            })
            .collect();
        table.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(y.1)));
        let got = fused.get(&qid).unwrap();
        ensure(got.len() == table.len(), || format!("{qid}: rrf length"))?;
        for (g, (s, d)) in got.iter().zip(&table) {
            ensure(g.docid == *d && g.score == *s, || format!("{qid}: rrf mismatch at {}", g.rank))?;
        }

        // Linear table
        let norm = |run: &[eval::RankedDoc], d: &str| -> f64 {
            let lo = run.iter().map(|x| x.score).fold(f64::INFINITY, f64::min);
            let hi = run.iter().map(|x| x.score).fold(f64::NEG_INFINITY, f64::max);
            run.iter()
                .find(|x| x.docid == d)
                .map_or(0.0, |x| if hi > lo { (x.score - lo) / (hi - lo) } else { 1.0 })
        };
        let mut table: Vec<(f64, &str)> = universe
            .iter()
            .map(|&d| (0.3 * norm(ra, d) + (1.0 - 0.3) * norm(rb, d), d))
            .collect();
        table.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(y.1)));
        let got = lin.get(&qid).unwrap();
        ensure(got.len() == table.len(), || format!("{qid}: linear length"))?;
        for (g, (s, d)) in got.iter().zip(&table) {
            ensure(g.docid == *d && g.score == *s, || format!("{qid}: linear mismatch at {}", g.rank))?;
        }
    }

    let mut one = Ranking::new();
    one.insert("q", vec![ScoredDoc::new("top", 3.0)]);
    let both = rrf(&[&one, &one.clone()], &p).map_err(|e| e.to_string())?;
    let s = both.get("q").unwrap()[0].score;
    ensure(s == 2.0 / 61.0, || format!("rank-1-in-both score {s}"))?;
    Ok(format!("5 queries x 2 runs x 100 docs exact; rank-1-in-both = {s:.6}"))
}
