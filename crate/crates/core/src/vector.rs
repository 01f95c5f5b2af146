//! Vector primitives and similarity metrics.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Norms at or below this are treated as zero by [`normalize`].
pub const ZERO_NORM_EPSILON: f64 = 1e-12;

/// A fixed-dimension embedding with finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector<S> {
    values: Vec<S>,
}

impl<S: Scalar> DenseVector<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { values })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| S::from_f64_lossy(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<S> {
        self.values
    }
}

impl<S> AsRef<[S]> for DenseVector<S> {
    fn as_ref(&self) -> &[S] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Dot,
    Cosine,
}

impl Metric {
    pub(crate) fn code(self) -> u8 {
        match self {
            Metric::Dot => 0,
            Metric::Cosine => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Metric::Dot),
            1 => Some(Metric::Cosine),
            _ => None,
        }
    }

    /// Bring a vector into the form this metric compares: unit length for
    /// cosine, untouched for dot.
    pub fn prepare<S: Scalar>(self, v: DenseVector<S>) -> Result<DenseVector<S>> {
        match self {
            Metric::Dot => Ok(v),
            Metric::Cosine => normalize(&v),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Dot => "dot",
            Metric::Cosine => "cosine",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" | "ip" | "inner_product" => Ok(Metric::Dot),
            "cosine" | "cos" => Ok(Metric::Cosine),
            other => Err(Error::InvalidParams(format!("unknown metric `{other}`"))),
        }
    }
}

/// A retrieved document and its similarity to the query.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub docid: String,
    pub score: f64,
}

impl ScoredDoc {
    pub fn new(docid: impl Into<String>, score: f64) -> Self {
        Self {
            docid: docid.into(),
            score,
        }
    }
}

/// Result-list order: higher score first, ties by ascending docid.
pub fn rank_order(a: &ScoredDoc, b: &ScoredDoc) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.docid.cmp(&b.docid))
}

/// Sort in result-list order and keep the first `k`.
pub fn top_k(mut docs: Vec<ScoredDoc>, k: usize) -> Vec<ScoredDoc> {
    if docs.len() > k && k > 0 {
        docs.select_nth_unstable_by(k - 1, rank_order);
        docs.truncate(k);
    }
    docs.sort_unstable_by(rank_order);
    docs.truncate(k);
    docs
}

/// Dot product of two equal-length slices, accumulated in `f64`.
///
/// Four independent partial sums let the loop vectorize; the summation order
/// is fixed, so results are reproducible.
#[inline]
pub fn dot_slice<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let rem_a = chunks_a.remainder();
    let rem_b = chunks_b.remainder();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for i in 0..4 {
            acc[i] += ca[i].as_() * cb[i].as_();
        }
    }
    let mut tail = 0.0;
    for (x, y) in rem_a.iter().zip(rem_b) {
        tail += x.as_() * y.as_();
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn check_dims<S>(a: &DenseVector<S>, b: &DenseVector<S>) -> Result<()> {
    if a.values.len() != b.values.len() {
        return Err(Error::Dimension {
            expected: a.values.len(),
            found: b.values.len(),
        });
    }
    Ok(())
}

pub fn dot<S: Scalar>(a: &DenseVector<S>, b: &DenseVector<S>) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dot_slice(&a.values, &b.values))
}

pub fn l2_norm<S: Scalar>(a: &DenseVector<S>) -> f64 {
    dot_slice(&a.values, &a.values).sqrt()
}

pub fn normalize<S: Scalar>(a: &DenseVector<S>) -> Result<DenseVector<S>> {
    let norm = l2_norm(a);
    if norm <= ZERO_NORM_EPSILON {
        return Err(Error::ZeroNorm);
    }
    let values = a
        .values
        .iter()
        .map(|&v| S::from_f64_lossy(v.as_() / norm))
        .collect();
    Ok(DenseVector { values })
}

/// Similarity under `metric`. Cosine inputs must already be unit length.
pub fn similarity<S: Scalar>(metric: Metric, a: &DenseVector<S>, b: &DenseVector<S>) -> Result<f64> {
    check_dims(a, b)?;
    if metric == Metric::Cosine {
        debug_assert!((l2_norm(a) - 1.0).abs() < 1e-3, "cosine input not unit-normalized");
        debug_assert!((l2_norm(b) - 1.0).abs() < 1e-3, "cosine input not unit-normalized");
    }
    Ok(dot_slice(&a.values, &b.values))
}
