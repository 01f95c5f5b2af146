use std::collections::HashMap;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Relevance judgments: `(qid, docid) -> grade`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QrelsTable {
    judgments: IndexMap<String, HashMap<String, u32>>,
}

impl QrelsTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a judgment; a repeated `(qid, docid)` pair is an error.
    pub fn insert(&mut self, qid: impl Into<String>, docid: impl Into<String>, grade: u32) -> Result<()> {
        let (qid, docid) = (qid.into(), docid.into());
        let q = self.judgments.entry(qid.clone()).or_default();
        if q.insert(docid.clone(), grade).is_some() {
            return Err(Error::InvalidParams(format!("duplicate judgment for ({qid}, {docid})")));
        }
        Ok(())
    }

    pub fn grade(&self, qid: &str, docid: &str) -> u32 {
        self.judgments
            .get(qid)
            .and_then(|q| q.get(docid))
            .copied()
            .unwrap_or(0)
    }

    pub fn contains_query(&self, qid: &str) -> bool {
        self.judgments.contains_key(qid)
    }

    pub fn query(&self, qid: &str) -> Option<&HashMap<String, u32>> {
        self.judgments.get(qid)
    }

    pub fn qids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    /// Number of documents with grade ≥ 1 for `qid`.
    pub fn num_relevant(&self, qid: &str) -> usize {
        self.judgments
            .get(qid)
            .map_or(0, |q| q.values().filter(|&&g| g >= 1).count())
    }
}

/// Parses `qid 0 docid grade` lines.
pub fn parse_qrels(text: &str, source: &str) -> Result<QrelsTable> {
    let mut table = QrelsTable::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(source, lineno, format!("expected 4 fields, found {}", fields.len())));
        }
        let grade: u32 = fields[3]
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("grade must be a non-negative integer, got `{}`", fields[3])))?;
        table
            .insert(fields[0], fields[2], grade)
            .map_err(|_| Error::parse(source, lineno, format!("duplicate judgment for ({}, {})", fields[0], fields[2])))?;
    }
    Ok(table)
}

pub fn load_qrels(path: &Path) -> Result<QrelsTable> {
    let text = fs::read_to_string(path)?;
    parse_qrels(&text, &path.display().to_string())
}
