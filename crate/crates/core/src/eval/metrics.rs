//! Rank-based effectiveness metrics.
//!
//! Only list order matters; scores are ignored. A document counts as relevant
//! when its grade is at least 1, and unjudged documents are non-relevant.
//! Queries without judgments are skipped. Judged queries absent from the run
//! score 0. Per-query values are averaged in ascending qid order.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::qrels::QrelsTable;
use crate::eval::run::{RankedDoc, Ranking};

/// Gain applied to a grade in DCG.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gain {
    /// `2^grade − 1`
    Exponential,
    /// `grade`, as computed by trec_eval's `ndcg_cut`.
    Linear,
}

impl Gain {
    fn apply(self, grade: u32) -> f64 {
        match self {
            Gain::Exponential => 2f64.powi(grade as i32) - 1.0,
            Gain::Linear => grade as f64,
        }
    }
}

fn docs_for<'a>(run: &'a Ranking, qid: &str) -> &'a [RankedDoc] {
    run.get(qid).unwrap_or(&[])
}

fn mean(values: &BTreeMap<String, f64>) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.values().sum::<f64>() / values.len() as f64
    }
}

pub fn mrr_per_query(run: &Ranking, qrels: &QrelsTable, cutoff: usize) -> BTreeMap<String, f64> {
    qrels
        .qids()
        .map(|qid| {
            let rr = docs_for(run, qid)
                .iter()
                .take(cutoff)
                .position(|d| qrels.grade(qid, &d.docid) >= 1)
                .map_or(0.0, |i| 1.0 / (i + 1) as f64);
            (qid.to_string(), rr)
        })
        .collect()
}

/// Mean reciprocal rank of the first relevant document within `cutoff`.
pub fn mrr_at(run: &Ranking, qrels: &QrelsTable, cutoff: usize) -> f64 {
    mean(&mrr_per_query(run, qrels, cutoff))
}

pub fn recall_per_query(run: &Ranking, qrels: &QrelsTable, cutoff: usize) -> BTreeMap<String, f64> {
    qrels
        .qids()
        .filter_map(|qid| {
            let total = qrels.num_relevant(qid);
            if total == 0 {
                return None;
            }
            let found = docs_for(run, qid)
                .iter()
                .take(cutoff)
                .filter(|d| qrels.grade(qid, &d.docid) >= 1)
                .count();
            Some((qid.to_string(), found as f64 / total as f64))
        })
        .collect()
}

/// Fraction of relevant documents retrieved within `cutoff`.
pub fn recall_at(run: &Ranking, qrels: &QrelsTable, cutoff: usize) -> f64 {
    mean(&recall_per_query(run, qrels, cutoff))
}

fn discount(i: usize) -> f64 {
    ((i + 2) as f64).log2()
}

pub fn ndcg_per_query(run: &Ranking, qrels: &QrelsTable, cutoff: usize, gain: Gain) -> BTreeMap<String, f64> {
    qrels
        .qids()
        .filter_map(|qid| {
            let mut ideal: Vec<u32> = qrels.query(qid)?.values().copied().filter(|&g| g > 0).collect();
            ideal.sort_unstable_by(|a, b| b.cmp(a));
            let idcg: f64 = ideal
                .iter()
                .take(cutoff)
                .enumerate()
                .map(|(i, &g)| gain.apply(g) / discount(i))
                .sum();
            if idcg <= 0.0 {
                return None;
            }
            let dcg: f64 = docs_for(run, qid)
                .iter()
                .take(cutoff)
                .enumerate()
                .map(|(i, d)| gain.apply(qrels.grade(qid, &d.docid)) / discount(i))
                .sum();
            Some((qid.to_string(), dcg / idcg))
        })
        .collect()
}

/// nDCG with exponential gain `2^grade − 1`.
pub fn ndcg_at(run: &Ranking, qrels: &QrelsTable, cutoff: usize) -> f64 {
    ndcg_at_with_gain(run, qrels, cutoff, Gain::Exponential)
}

pub fn ndcg_at_with_gain(run: &Ranking, qrels: &QrelsTable, cutoff: usize, gain: Gain) -> f64 {
    mean(&ndcg_per_query(run, qrels, cutoff, gain))
}

/// A named metric, as accepted on the command line.
///
/// `mrr@N`, `recall@N` and `ndcg@N` use this crate's definitions;
/// `recip_rank`, `recall_N` and `ndcg_cut_N` follow trec_eval naming, and
/// `ndcg_cut_N` uses trec_eval's linear gain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricSpec {
    Mrr(usize),
    Recall(usize),
    Ndcg(usize, Gain),
}

impl MetricSpec {
    pub fn evaluate(&self, run: &Ranking, qrels: &QrelsTable) -> f64 {
        match *self {
            MetricSpec::Mrr(c) => mrr_at(run, qrels, c),
            MetricSpec::Recall(c) => recall_at(run, qrels, c),
            MetricSpec::Ndcg(c, g) => ndcg_at_with_gain(run, qrels, c, g),
        }
    }
}

impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unknown metric `{s}`"));
        let cutoff = |v: &str| v.parse::<usize>().ok().filter(|&c| c > 0).ok_or_else(bad);
        let lower = s.to_ascii_lowercase();
        if let Some((name, c)) = lower.split_once('@') {
            let c = cutoff(c)?;
            return match name {
                "mrr" | "rr" => Ok(MetricSpec::Mrr(c)),
                "recall" | "r" => Ok(MetricSpec::Recall(c)),
                "ndcg" => Ok(MetricSpec::Ndcg(c, Gain::Exponential)),
                _ => Err(bad()),
            };
        }
        if lower == "recip_rank" {
            return Ok(MetricSpec::Mrr(usize::MAX));
        }
        if let Some(c) = lower.strip_prefix("recall_") {
            return Ok(MetricSpec::Recall(cutoff(c)?));
        }
        if let Some(c) = lower.strip_prefix("ndcg_cut_") {
            return Ok(MetricSpec::Ndcg(cutoff(c)?, Gain::Linear));
        }
        Err(bad())
    }
}
