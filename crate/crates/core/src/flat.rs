//! Exact brute-force search. Every recall number in this crate is measured
//! against this index.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::{dot_slice, top_k, DenseVector, Metric, ScoredDoc};

/// Brute-force top-k over `(docid, vector)` pairs.
pub fn flat_search<S: Scalar>(
    corpus: &[(String, DenseVector<S>)],
    query: &DenseVector<S>,
    k: usize,
    metric: Metric,
) -> Result<Vec<ScoredDoc>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut scored = Vec::with_capacity(corpus.len());
    for (docid, v) in corpus {
        if v.dim() != query.dim() {
            return Err(Error::Dimension {
                expected: query.dim(),
                found: v.dim(),
            });
        }
        debug_assert!(metric == Metric::Dot || (crate::vector::l2_norm(v) - 1.0).abs() < 1e-3);
        scored.push(ScoredDoc::new(docid.clone(), dot_slice(v.as_slice(), query.as_slice())));
    }
    Ok(top_k(scored, k))
}

/// Row-major vector store for repeated exact queries.
#[derive(Debug, Clone)]
pub struct FlatIndex<S> {
    metric: Metric,
    dim: usize,
    docids: Vec<String>,
    data: Vec<S>,
    seen: HashSet<String>,
}

impl<S: Scalar> FlatIndex<S> {
    pub fn new(metric: Metric, dim: usize) -> Self {
        Self {
            metric,
            dim,
            docids: Vec::new(),
            data: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.docids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docids.is_empty()
    }

    /// Adds a vector, normalizing it first under the cosine metric.
    pub fn add(&mut self, docid: impl Into<String>, v: DenseVector<S>) -> Result<()> {
        let docid = docid.into();
        if v.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: v.dim(),
            });
        }
        if !self.seen.insert(docid.clone()) {
            return Err(Error::DuplicateDoc(docid));
        }
        let v = self.metric.prepare(v)?;
        self.data.extend_from_slice(v.as_slice());
        self.docids.push(docid);
        Ok(())
    }

    pub fn search(&self, query: &DenseVector<S>, k: usize) -> Result<Vec<ScoredDoc>> {
        if self.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if query.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: query.dim(),
            });
        }
        let q = query.as_slice();
        let scored = self
            .data
            .chunks_exact(self.dim)
            .zip(&self.docids)
            .map(|(row, id)| ScoredDoc::new(id.clone(), dot_slice(row, q)))
            .collect();
        Ok(top_k(scored, k))
    }
}
