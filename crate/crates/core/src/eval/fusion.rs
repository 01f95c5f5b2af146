//! Rank fusion of two or more runs.
//!
//! Fused rankings list queries in ascending qid order, so the output does not
//! depend on the order in which runs are supplied.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::run::{RankedDoc, Ranking};
use crate::vector::{rank_order, ScoredDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionMethod {
    Rrf,
    Linear,
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rrf" => Ok(FusionMethod::Rrf),
            "linear" | "interpolation" => Ok(FusionMethod::Linear),
            other => Err(Error::InvalidParams(format!("unknown fusion method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionParams {
    pub method: FusionMethod,
    pub rrf_k: u32,
    /// Weight of the first run under linear fusion.
    pub alpha: f64,
    /// Only the top `depth` results of each input run are considered.
    pub depth: usize,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            method: FusionMethod::Rrf,
            rrf_k: 60,
            alpha: 0.5,
            depth: 1000,
        }
    }
}

impl FusionParams {
    pub fn validate(&self) -> Result<()> {
        if self.rrf_k == 0 || self.depth == 0 {
            return Err(Error::InvalidParams("rrf_k and depth must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParams(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

fn head(docs: &[RankedDoc], depth: usize) -> impl Iterator<Item = &RankedDoc> {
    docs.iter().filter(move |d| d.rank <= depth)
}

fn all_qids<'a>(runs: impl IntoIterator<Item = &'a Ranking>) -> BTreeSet<&'a str> {
    runs.into_iter().flat_map(|r| r.qids()).collect()
}

fn finish(scores: HashMap<&str, f64>) -> Vec<ScoredDoc> {
    let mut docs: Vec<ScoredDoc> = scores.into_iter().map(|(d, s)| ScoredDoc::new(d, s)).collect();
    docs.sort_unstable_by(rank_order);
    docs
}

/// Reciprocal rank fusion: each run adds `1 / (rrf_k + rank)` for every
/// document in its top `depth`.
pub fn rrf(runs: &[&Ranking], p: &FusionParams) -> Result<Ranking> {
    p.validate()?;
    if runs.len() < 2 {
        return Err(Error::EmptyInput(format!("RRF needs at least two runs, got {}", runs.len())));
    }
    let mut out = Ranking::new();
    for qid in all_qids(runs.iter().copied()) {
        let mut scores: HashMap<&str, f64> = HashMap::new();
        // Sum in a fixed order per document so the result is bit-stable.
        let mut contributions: HashMap<&str, Vec<usize>> = HashMap::new();
        for run in runs {
            if let Some(docs) = run.get(qid) {
                for d in head(docs, p.depth) {
                    contributions.entry(d.docid.as_str()).or_default().push(d.rank);
                }
            }
        }
        for (doc, mut ranks) in contributions {
            ranks.sort_unstable();
            let s = ranks.iter().map(|&r| 1.0 / (p.rrf_k as f64 + r as f64)).sum();
            scores.insert(doc, s);
        }
        out.insert(qid, finish(scores));
    }
    Ok(out)
}

/// Per-query min-max normalization over the top `depth`; a constant-score
/// list maps every present document to 1.0.
fn normalized(docs: &[RankedDoc], depth: usize) -> HashMap<&str, f64> {
    let top: Vec<&RankedDoc> = head(docs, depth).collect();
    let min = top.iter().map(|d| d.score).fold(f64::INFINITY, f64::min);
    let max = top.iter().map(|d| d.score).fold(f64::NEG_INFINITY, f64::max);
    top.into_iter()
        .map(|d| {
            let v = if max > min { (d.score - min) / (max - min) } else { 1.0 };
            (d.docid.as_str(), v)
        })
        .collect()
}

/// Linear interpolation of min-max normalized scores:
/// `alpha · norm(a) + (1 − alpha) · norm(b)`, absent documents scoring 0.
pub fn linear_fuse(a: &Ranking, b: &Ranking, p: &FusionParams) -> Result<Ranking> {
    p.validate()?;
    let mut out = Ranking::new();
    for qid in all_qids([a, b]) {
        let na = a.get(qid).map(|d| normalized(d, p.depth)).unwrap_or_default();
        let nb = b.get(qid).map(|d| normalized(d, p.depth)).unwrap_or_default();
        let mut scores: HashMap<&str, f64> = HashMap::new();
        for doc in na.keys().chain(nb.keys()) {
            let sa = na.get(doc).copied().unwrap_or(0.0);
            let sb = nb.get(doc).copied().unwrap_or(0.0);
            scores.insert(doc, p.alpha * sa + (1.0 - p.alpha) * sb);
        }
        out.insert(qid, finish(scores));
    }
    Ok(out)
}

/// Dispatches on `p.method`. Linear fusion takes exactly two runs.
pub fn fuse(runs: &[&Ranking], p: &FusionParams) -> Result<Ranking> {
    match p.method {
        FusionMethod::Rrf => rrf(runs, p),
        FusionMethod::Linear => match runs {
            [a, b] => linear_fuse(a, b, p),
            _ => Err(Error::InvalidParams(format!("linear fusion takes two runs, got {}", runs.len()))),
        },
    }
}
