#![allow(dead_code)]

pub mod conformance;
pub mod invariants;

use std::path::PathBuf;

use hybrid_core::vector::normalize;
use hybrid_core::{ScoredDoc, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Uniform random directions on the unit sphere (normalized Gaussians).
pub fn unit_vectors(n: usize, d: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..d).map(|_| gaussian(&mut rng)).collect();
            normalize(&Vector::from_f64(&raw).unwrap()).unwrap()
        })
        .collect()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn corpus(n: usize, d: usize, seed: u64) -> Vec<(String, Vector)> {
    unit_vectors(n, d, seed)
        .into_iter()
        .enumerate()
        .map(|(i, v)| (format!("doc{i:06}"), v))
        .collect()
}

/// |got ∩ truth| / |truth| by docid.
pub fn recall(got: &[ScoredDoc], truth: &[ScoredDoc]) -> f64 {
    if truth.is_empty() {
        return 1.0;
    }
    let hits = got
        .iter()
        .filter(|g| truth.iter().any(|t| t.docid == g.docid))
        .count();
    hits as f64 / truth.len() as f64
}

pub fn mean_recall(got: &[Vec<ScoredDoc>], truth: &[Vec<ScoredDoc>]) -> f64 {
    got.iter().zip(truth).map(|(g, t)| recall(g, t)).sum::<f64>() / got.len() as f64
}
