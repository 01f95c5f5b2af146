use std::cmp::Ordering;

/// A graph node paired with its similarity to the current query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: u32,
    pub score: f64,
}

impl Candidate {
    pub fn new(id: u32, score: f64) -> Self {
        Self { id, score }
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greater means better: higher score, then lower node id.
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Best-first order for sorting candidate lists.
pub fn best_first(a: &Candidate, b: &Candidate) -> Ordering {
    b.cmp(a)
}

/// Diversity heuristic for picking up to `m` links.
///
/// Candidates carry their similarity to the base vector. Walking them
/// best-first, a candidate is kept only when it is strictly closer to the base
/// than to every neighbor kept so far. Pruned candidates then fill any
/// remaining slots, best-first. `similarity(a, b)` scores two candidate nodes
/// against each other.
pub fn select_neighbors<F>(candidates: &[Candidate], m: usize, mut similarity: F) -> Vec<u32>
where
    F: FnMut(u32, u32) -> f64,
{
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable_by(best_first);
    if sorted.len() <= m {
        return sorted.into_iter().map(|c| c.id).collect();
    }

    let mut kept: Vec<u32> = Vec::with_capacity(m);
    let mut pruned: Vec<u32> = Vec::new();
    for c in &sorted {
        if kept.len() >= m {
            break;
        }
        let diverse = kept.iter().all(|&r| c.score > similarity(c.id, r));
        if diverse {
            kept.push(c.id);
        } else {
            pruned.push(c.id);
        }
    }
    let room = m - kept.len();
    kept.extend(pruned.into_iter().take(room));
    kept
}
