use std::collections::HashMap;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::sparse::{tokenize, InvertedIndex};
use crate::vector::{top_k, ScoredDoc};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 0.9, b: 0.4 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self> {
        if k1.is_nan() || k1 < 0.0 || !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidParams(format!("need k1 >= 0 and b in [0, 1], got k1={k1}, b={b}")));
        }
        Ok(Self { k1, b })
    }
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
pub fn bm25_idf<F: Float>(df: F, n: F) -> F {
    let half = F::from(0.5).unwrap();
    (F::one() + (n - df + half) / (df + half)).ln()
}

/// Weight of one term occurrence in one document.
pub fn bm25_term_weight<F: Float>(tf: F, df: F, dl: F, avgdl: F, n: F, k1: F, b: F) -> F {
    let norm = k1 * (F::one() - b + b * dl / avgdl);
    bm25_idf(df, n) * tf * (k1 + F::one()) / (tf + norm)
}

/// Term-at-a-time BM25. Repeated query terms contribute once per occurrence;
/// documents matching no term are left out.
pub fn bm25_search(idx: &InvertedIndex, query: &str, k: usize, p: Bm25Params) -> Result<Vec<ScoredDoc>> {
    if idx.num_docs() == 0 {
        return Err(Error::EmptyIndex);
    }
    let n = idx.num_docs() as f64;
    let mut acc: HashMap<u32, f64> = HashMap::new();
    for term in tokenize(query) {
        let postings = idx.postings(&term);
        if postings.is_empty() {
            continue;
        }
        let df = postings.len() as f64;
        for post in postings {
            let w = bm25_term_weight(
                post.tf as f64,
                df,
                idx.doc_len(post.doc) as f64,
                idx.avgdl(),
                n,
                p.k1,
                p.b,
            );
            *acc.entry(post.doc).or_default() += w;
        }
    }
    let scored = acc
        .into_iter()
        .map(|(doc, s)| ScoredDoc::new(idx.docid(doc), s))
        .collect();
    Ok(top_k(scored, k))
}
