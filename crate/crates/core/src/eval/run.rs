//! TREC run files: `qid Q0 docid rank score tag`.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::vector::ScoredDoc;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedDoc {
    pub docid: String,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

/// Ranked result lists keyed by query id, in query insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ranking {
    queries: IndexMap<String, Vec<RankedDoc>>,
}

impl Ranking {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a query's results, assigning ranks from 1 in the given order.
    /// An empty list leaves the query out entirely.
    pub fn insert(&mut self, qid: impl Into<String>, docs: Vec<ScoredDoc>) {
        if docs.is_empty() {
            return;
        }
        let ranked = docs
            .into_iter()
            .enumerate()
            .map(|(i, d)| RankedDoc {
                docid: d.docid,
                score: d.score,
                rank: i + 1,
            })
            .collect();
        self.queries.insert(qid.into(), ranked);
    }

    pub fn get(&self, qid: &str) -> Option<&[RankedDoc]> {
        self.queries.get(qid).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[RankedDoc])> {
        self.queries.iter().map(|(q, d)| (q.as_str(), d.as_slice()))
    }

    pub fn qids(&self) -> impl Iterator<Item = &str> {
        self.queries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Checks contiguous ranks, non-increasing scores and unique docids.
    pub fn validate(&self) -> Result<()> {
        for (qid, docs) in &self.queries {
            check_query(qid, docs).map_err(Error::InvalidParams)?;
        }
        Ok(())
    }

    /// Run-file text. Scores print with six decimals.
    pub fn to_trec(&self, tag: &str) -> String {
        let mut out = String::new();
        for (qid, docs) in &self.queries {
            for d in docs {
                out.push_str(&format!("{qid} Q0 {} {} {:.6} {tag}\n", d.docid, d.rank, d.score));
            }
        }
        out
    }

    /// Applies `f` to every score, keeping ranks.
    pub fn map_scores(&self, f: impl Fn(f64) -> f64) -> Ranking {
        let queries = self
            .queries
            .iter()
            .map(|(q, docs)| {
                let docs = docs
                    .iter()
                    .map(|d| RankedDoc {
                        score: f(d.score),
                        ..d.clone()
                    })
                    .collect();
                (q.clone(), docs)
            })
            .collect();
        Ranking { queries }
    }
}

fn check_query(qid: &str, docs: &[RankedDoc]) -> std::result::Result<(), String> {
    let mut seen = HashSet::new();
    for (i, d) in docs.iter().enumerate() {
        if d.rank != i + 1 {
            return Err(format!("query {qid}: rank {} where {} expected", d.rank, i + 1));
        }
        if i > 0 && d.score > docs[i - 1].score {
            return Err(format!("query {qid}: score increases at rank {}", d.rank));
        }
        if !seen.insert(d.docid.as_str()) {
            return Err(format!("query {qid}: duplicate docid {}", d.docid));
        }
    }
    Ok(())
}

/// Parses run text.
///
/// Strict mode rejects non-contiguous ranks, increasing scores within a query,
/// and lines of a query that are not contiguous in the file. Lenient mode
/// re-sorts each query by score (ties by docid) and reassigns ranks.
pub fn parse_run(text: &str, source: &str, strict: bool) -> Result<Ranking> {
    let mut queries: IndexMap<String, Vec<RankedDoc>> = IndexMap::new();
    let mut first_line: IndexMap<String, usize> = IndexMap::new();
    let mut last_qid: Option<String> = None;
    let mut seen: HashSet<(String, String)> = HashSet::new();

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::parse(source, lineno, format!("expected 6 fields, found {}", fields.len())));
        }
        let qid = fields[0].to_string();
        let docid = fields[2].to_string();
        let rank: usize = fields[3]
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("bad rank `{}`", fields[3])))?;
        let score: f64 = fields[4]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::parse(source, lineno, format!("bad score `{}`", fields[4])))?;

        if !seen.insert((qid.clone(), docid.clone())) {
            return Err(Error::parse(source, lineno, format!("duplicate docid {docid} for query {qid}")));
        }
        if strict {
            if last_qid.as_deref() != Some(qid.as_str()) && queries.contains_key(&qid) {
                return Err(Error::parse(source, lineno, format!("lines for query {qid} are not contiguous")));
            }
            let docs = queries.get(&qid);
            let expected = docs.map_or(1, |d| d.len() + 1);
            if rank != expected {
                return Err(Error::parse(source, lineno, format!("rank {rank} where {expected} expected")));
            }
            if let Some(prev) = docs.and_then(|d| d.last()) {
                if score > prev.score {
                    return Err(Error::parse(source, lineno, "score increases with rank"));
                }
            }
        }
        first_line.entry(qid.clone()).or_insert(lineno);
        last_qid = Some(qid.clone());
        queries.entry(qid).or_default().push(RankedDoc { docid, score, rank });
    }

    if !strict {
        for docs in queries.values_mut() {
            docs.sort_by(|a, b| {
                b.score
                    .total_cmp(&a.score)
                    .then_with(|| a.rank.cmp(&b.rank))
                    .then_with(|| a.docid.cmp(&b.docid))
            });
            for (i, d) in docs.iter_mut().enumerate() {
                d.rank = i + 1;
            }
        }
    }
    Ok(Ranking { queries })
}

pub fn load_run(path: &Path, strict: bool) -> Result<Ranking> {
    let text = fs::read_to_string(path)?;
    parse_run(&text, &path.display().to_string(), strict)
}

pub fn write_run(r: &Ranking, tag: &str, path: &Path) -> Result<()> {
    if tag.is_empty() || tag.contains(char::is_whitespace) {
        return Err(Error::InvalidParams(format!("run tag `{tag}` must be a single non-empty token")));
    }
    r.validate()?;
    let mut f = fs::File::create(path)?;
    f.write_all(r.to_trec(tag).as_bytes())?;
    Ok(())
}
