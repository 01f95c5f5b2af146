use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::hnsw::level::LevelGenerator;
use crate::hnsw::params::{BuildParams, SearchParams};
use crate::hnsw::select::{best_first, select_neighbors, Candidate};
use crate::scalar::Scalar;
use crate::vector::{dot_slice, DenseVector, Metric, ScoredDoc};

/// Epoch-stamped visited set; clearing is O(1) between searches.
#[derive(Debug, Clone, Default)]
pub(crate) struct Visited {
    stamps: Vec<u32>,
    epoch: u32,
}

impl Visited {
    pub(crate) fn with_capacity(n: usize) -> Self {
        Self {
            stamps: vec![0; n],
            epoch: 1,
        }
    }

    fn reset(&mut self, n: usize) {
        if self.stamps.len() < n {
            self.stamps.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamps.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// Returns true when `id` was not yet visited.
    #[inline]
    fn insert(&mut self, id: u32) -> bool {
        let slot = &mut self.stamps[id as usize];
        if *slot == self.epoch {
            false
        } else {
            *slot = self.epoch;
            true
        }
    }
}

/// Hierarchical navigable small-world graph over vectors of scalar type `S`.
///
/// Node ids are dense `u32`s in insertion order. `links[node][layer]` holds the
/// node's neighbors at each layer from 0 up to its own level.
#[derive(Debug, Clone)]
pub struct HnswGraph<S> {
    params: BuildParams,
    dim: usize,
    data: Vec<S>,
    docids: Vec<String>,
    lookup: HashMap<String, u32>,
    links: Vec<Vec<Vec<u32>>>,
    entry_point: Option<u32>,
    max_level: usize,
    levels: LevelGenerator,
    scratch: Visited,
}

impl<S: Scalar> HnswGraph<S> {
    pub fn new(params: BuildParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            dim: 0,
            data: Vec::new(),
            docids: Vec::new(),
            lookup: HashMap::new(),
            links: Vec::new(),
            entry_point: None,
            max_level: 0,
            levels: LevelGenerator::new(params.seed, params.m),
            scratch: Visited::default(),
        })
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn metric(&self) -> Metric {
        self.params.metric
    }

    /// Vector dimension; 0 until the first insert.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.docids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docids.is_empty()
    }

    pub fn entry_point(&self) -> Option<u32> {
        self.entry_point
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn node_level(&self, node: u32) -> usize {
        self.links[node as usize].len() - 1
    }

    pub fn neighbors(&self, node: u32, layer: usize) -> &[u32] {
        self.links[node as usize]
            .get(layer)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn docid(&self, node: u32) -> &str {
        &self.docids[node as usize]
    }

    pub fn node_id(&self, docid: &str) -> Option<u32> {
        self.lookup.get(docid).copied()
    }

    pub fn vector(&self, node: u32) -> &[S] {
        let start = node as usize * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn docids(&self) -> &[String] {
        &self.docids
    }

    #[inline]
    fn score(&self, query: &[S], node: u32) -> f64 {
        dot_slice(query, self.vector(node))
    }

    /// Adds a document. Under the cosine metric the vector is normalized first.
    pub fn insert(&mut self, docid: impl Into<String>, v: DenseVector<S>) -> Result<u32> {
        let docid = docid.into();
        if self.lookup.contains_key(&docid) {
            return Err(Error::DuplicateDoc(docid));
        }
        if !self.is_empty() && v.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: v.dim(),
            });
        }
        if self.len() >= u32::MAX as usize {
            return Err(Error::InvalidParams("segment node limit reached".into()));
        }
        let v = self.params.metric.prepare(v)?;
        if self.is_empty() {
            self.dim = v.dim();
        }

        let node = self.len() as u32;
        let level = self.levels.next_level();
        self.data.extend_from_slice(v.as_slice());
        self.lookup.insert(docid.clone(), node);
        self.docids.push(docid);
        self.links.push(vec![Vec::new(); level + 1]);

        let Some(entry) = self.entry_point else {
            self.entry_point = Some(node);
            self.max_level = level;
            return Ok(node);
        };

        let query = v.as_slice();
        let mut scratch = std::mem::take(&mut self.scratch);
        let mut eps = vec![Candidate::new(entry, self.score(query, entry))];
        for layer in (level + 1..=self.max_level).rev() {
            eps = self.search_layer_with(query, &eps, 1, layer, &mut scratch);
        }

        for layer in (0..=level.min(self.max_level)).rev() {
            let found = self.search_layer_with(query, &eps, self.params.ef_construction, layer, &mut scratch);
            let chosen = select_neighbors(&found, self.params.m, |a, b| {
                dot_slice(self.vector(a), self.vector(b))
            });
            for &nb in &chosen {
                self.link(nb, node, layer);
            }
            self.links[node as usize][layer] = chosen;
            eps = found;
        }
        self.scratch = scratch;

        if level > self.max_level {
            self.max_level = level;
            self.entry_point = Some(node);
        }
        Ok(node)
    }

    /// Adds `to` to `from`'s list at `layer`, re-selecting if over the cap.
    fn link(&mut self, from: u32, to: u32, layer: usize) {
        let cap = self.params.max_links(layer);
        let list = &self.links[from as usize][layer];
        if list.len() < cap {
            self.links[from as usize][layer].push(to);
            return;
        }
        let base = self.vector(from);
        let mut cands: Vec<Candidate> = list
            .iter()
            .map(|&n| Candidate::new(n, dot_slice(base, self.vector(n))))
            .collect();
        cands.push(Candidate::new(to, dot_slice(base, self.vector(to))));
        let pruned = select_neighbors(&cands, cap, |a, b| dot_slice(self.vector(a), self.vector(b)));
        self.links[from as usize][layer] = pruned;
    }

    /// Best-first expansion of one layer from `entry`, keeping the `ef` best
    /// candidates seen. Returns them best-first.
    pub fn search_layer(&self, query: &[S], entry: &[Candidate], ef: usize, layer: usize) -> Vec<Candidate> {
        let mut visited = Visited::with_capacity(self.len());
        self.search_layer_with(query, entry, ef, layer, &mut visited)
    }

    fn search_layer_with(
        &self,
        query: &[S],
        entry: &[Candidate],
        ef: usize,
        layer: usize,
        visited: &mut Visited,
    ) -> Vec<Candidate> {
        let ef = ef.max(1);
        visited.reset(self.len());
        let mut frontier: BinaryHeap<Candidate> = BinaryHeap::with_capacity(ef * 2);
        let mut results: BinaryHeap<Reverse<Candidate>> = BinaryHeap::with_capacity(ef + 1);
        for &c in entry {
            if visited.insert(c.id) {
                frontier.push(c);
                results.push(Reverse(c));
                if results.len() > ef {
                    results.pop();
                }
            }
        }

        while let Some(current) = frontier.pop() {
            let worst = results.peek().expect("results never empty here").0;
            if current < worst {
                break;
            }
            for &nb in self.neighbors(current.id, layer) {
                if !visited.insert(nb) {
                    continue;
                }
                let cand = Candidate::new(nb, self.score(query, nb));
                if results.len() < ef || cand > results.peek().unwrap().0 {
                    frontier.push(cand);
                    results.push(Reverse(cand));
                    if results.len() > ef {
                        results.pop();
                    }
                }
            }
        }

        let mut out: Vec<Candidate> = results.into_iter().map(|r| r.0).collect();
        out.sort_unstable_by(best_first);
        out
    }

    /// Approximate top-k: greedy descent to layer 1, then a beam of width
    /// `ef_search` on layer 0.
    pub fn knn_search(&self, query: &DenseVector<S>, params: SearchParams) -> Result<Vec<ScoredDoc>> {
        params.validate()?;
        let Some(entry) = self.entry_point else {
            return Err(Error::EmptyIndex);
        };
        if query.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: query.dim(),
            });
        }
        let q = query.as_slice();
        let mut visited = Visited::with_capacity(self.len());
        let mut eps = vec![Candidate::new(entry, self.score(q, entry))];
        for layer in (1..=self.max_level).rev() {
            eps = self.search_layer_with(q, &eps, 1, layer, &mut visited);
        }
        let found = self.search_layer_with(q, &eps, params.ef_search, 0, &mut visited);

        let mut docs: Vec<ScoredDoc> = found
            .into_iter()
            .map(|c| ScoredDoc::new(self.docid(c.id), c.score))
            .collect();
        docs.sort_unstable_by(crate::vector::rank_order);
        docs.truncate(params.k);
        Ok(docs)
    }

    /// Reassembles a graph from stored parts, checking structural invariants.
    ///
    /// `data` is row-major with `docids.len()` rows of `dim` values.
    pub fn from_parts(
        params: BuildParams,
        dim: usize,
        data: Vec<S>,
        docids: Vec<String>,
        links: Vec<Vec<Vec<u32>>>,
        entry_point: Option<u32>,
    ) -> Result<Self> {
        params.validate()?;
        let n = docids.len();
        let corrupt = |m: String| Err(Error::Corrupt(m));
        if links.len() != n || data.len() != n * dim {
            return corrupt(format!("inconsistent node count ({n} ids, {} link sets)", links.len()));
        }
        let mut lookup = HashMap::with_capacity(n);
        for (i, d) in docids.iter().enumerate() {
            if lookup.insert(d.clone(), i as u32).is_some() {
                return Err(Error::DuplicateDoc(d.clone()));
            }
        }
        let mut max_level = 0;
        for (node, per_layer) in links.iter().enumerate() {
            if per_layer.is_empty() {
                return corrupt(format!("node {node} has no layers"));
            }
            max_level = max_level.max(per_layer.len() - 1);
            for (layer, list) in per_layer.iter().enumerate() {
                if list.len() > params.max_links(layer) {
                    return corrupt(format!("node {node} exceeds degree cap at layer {layer}"));
                }
                for &nb in list {
                    let ok = (nb as usize) < n && links[nb as usize].len() > layer;
                    if !ok {
                        return corrupt(format!("dangling edge {node}->{nb} at layer {layer}"));
                    }
                }
            }
        }
        match entry_point {
            Some(ep) if (ep as usize) < n && links[ep as usize].len() - 1 == max_level => {}
            None if n == 0 => {}
            _ => return corrupt("entry point missing or not at the top level".into()),
        }
        Ok(Self {
            params,
            dim,
            data,
            docids,
            lookup,
            links,
            entry_point,
            max_level,
            levels: LevelGenerator::resumed(params.seed, params.m, n as u64),
            scratch: Visited::default(),
        })
    }

    /// Per-node adjacency, `[node][layer]`.
    pub fn links(&self) -> &[Vec<Vec<u32>>] {
        &self.links
    }

    /// Row-major vector storage.
    pub fn raw_vectors(&self) -> &[S] {
        &self.data
    }
}
