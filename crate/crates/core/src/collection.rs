//! JSON-lines collections and topics, tab-separated queries.
//!
//! Dense collection lines look like `{"docid": "d1", "vector": [0.1, ...]}`,
//! text collection lines like `{"docid": "d1", "contents": "..."}`. Topic
//! lines carry a `qid` plus a payload field (`vector` or `text` by default).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::vector::Metric;
use crate::Vector;

#[derive(Deserialize)]
struct DenseLine {
    #[serde(alias = "id")]
    docid: String,
    vector: Vec<f64>,
}

#[derive(Deserialize)]
struct TextLine {
    #[serde(alias = "id")]
    docid: String,
    contents: String,
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

/// Yields `(line number, line)` for non-blank lines.
fn lines(path: &Path) -> Result<impl Iterator<Item = Result<(usize, String)>>> {
    let reader = BufReader::new(File::open(path)?);
    Ok(reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty())))
}

/// Streams a dense-vector collection.
pub fn read_dense_collection(path: &Path) -> Result<impl Iterator<Item = Result<(String, Vector)>>> {
    let name = source_name(path);
    Ok(lines(path)?.map(move |item| {
        let (lineno, line) = item?;
        let doc: DenseLine = serde_json::from_str(&line).map_err(|e| Error::parse(&name, lineno, e.to_string()))?;
        let v = Vector::from_f64(&doc.vector).map_err(|e| Error::parse(&name, lineno, e.to_string()))?;
        Ok((doc.docid, v))
    }))
}

/// Streams a text collection.
pub fn read_text_collection(path: &Path) -> Result<impl Iterator<Item = Result<(String, String)>>> {
    let name = source_name(path);
    Ok(lines(path)?.map(move |item| {
        let (lineno, line) = item?;
        let doc: TextLine = serde_json::from_str(&line).map_err(|e| Error::parse(&name, lineno, e.to_string()))?;
        Ok((doc.docid, doc.contents))
    }))
}

fn topic_object(name: &str, lineno: usize, line: &str) -> Result<(String, serde_json::Value)> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::parse(name, lineno, e.to_string()))?;
    let qid = match value.get("qid").or_else(|| value.get("id")) {
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(serde_json::Value::Number(n)) => n.to_string(),
        _ => return Err(Error::parse(name, lineno, "topic lacks a `qid`")),
    };
    Ok((qid, value))
}

/// Reads vector topics from field `field`, preparing each for `metric`
/// (unit-normalized under cosine). All vectors must share one dimension.
pub fn read_vector_topics(path: &Path, field: &str, metric: Metric) -> Result<Vec<(String, Vector)>> {
    let name = source_name(path);
    let mut topics = Vec::new();
    let mut dim = None;
    for item in lines(path)? {
        let (lineno, line) = item?;
        let (qid, value) = topic_object(&name, lineno, &line)?;
        let raw: Vec<f64> = value
            .get(field)
            .and_then(|v| v.as_array())
            .and_then(|a| a.iter().map(|x| x.as_f64()).collect())
            .ok_or_else(|| Error::parse(&name, lineno, format!("topic {qid} lacks a numeric `{field}` array")))?;
        let v = Vector::from_f64(&raw).map_err(|e| Error::parse(&name, lineno, format!("topic {qid}: {e}")))?;
        match dim {
            None => dim = Some(v.dim()),
            Some(d) if d != v.dim() => {
                return Err(Error::parse(
                    &name,
                    lineno,
                    format!("topic {qid}: dimension {} differs from {d}", v.dim()),
                ))
            }
            _ => {}
        }
        let v = metric
            .prepare(v)
            .map_err(|e| Error::parse(&name, lineno, format!("topic {qid}: {e}")))?;
        topics.push((qid, v));
    }
    Ok(topics)
}

/// Reads text queries. JSON-lines input takes the text from `field`; anything
/// else is read as `qid<TAB>text`.
pub fn read_text_queries(path: &Path, field: &str) -> Result<Vec<(String, String)>> {
    let name = source_name(path);
    let mut out = Vec::new();
    for item in lines(path)? {
        let (lineno, line) = item?;
        if line.trim_start().starts_with('{') {
            let (qid, value) = topic_object(&name, lineno, &line)?;
            let text = value
                .get(field)
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::parse(&name, lineno, format!("topic {qid} lacks a string `{field}`")))?;
            out.push((qid, text.to_string()));
        } else {
            let (qid, text) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(&name, lineno, "expected `qid<TAB>text`"))?;
            out.push((qid.to_string(), text.to_string()));
        }
    }
    Ok(out)
}
