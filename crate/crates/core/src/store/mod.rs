//! Segmented HNSW indexes on disk.
//!
//! An index directory holds `manifest.json`, one `segment-<id>.bin` per
//! segment, and `index.lock` while a writer is active. The manifest is always
//! written last via an atomic rename, so a crashed build never leaves a
//! manifest that points at missing or partial segments.

mod manifest;
pub mod segment;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

pub use manifest::{IndexManifest, SegmentDescriptor, FORMAT_VERSION, MANIFEST_FILE};

use crate::error::{Error, Result};
use crate::hnsw::{BuildParams, SearchParams};
use crate::vector::{dot_slice, l2_norm, top_k, Metric, ScoredDoc, ZERO_NORM_EPSILON};
use crate::{Graph, Vector};

pub const LOCK_FILE: &str = "index.lock";

pub fn segment_file_name(id: u32) -> String {
    format!("segment-{id}.bin")
}

/// Exclusive writer lock on an index directory, released on drop.
#[derive(Debug)]
pub struct IndexLock {
    path: PathBuf,
}

impl IndexLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(Self { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(dir.to_path_buf())),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for IndexLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Number of builder threads; each builds its own segments.
    pub threads: usize,
    /// Start a new segment once a worker's current one holds this many docs.
    pub segment_size: Option<usize>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            segment_size: None,
        }
    }
}

/// Seed for segment `local` of builder `worker`, derived from the index seed
/// with a SplitMix64 finalizer.
pub fn segment_seed(base: u64, worker: usize, local: usize) -> u64 {
    let mut z = base
        .wrapping_add((worker as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((local as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct BuiltSegment {
    worker: usize,
    local: usize,
    graph: Graph,
}

fn build_worker(
    worker: usize,
    params: BuildParams,
    segment_size: Option<usize>,
    rx: mpsc::Receiver<(String, Vector)>,
) -> Result<Vec<BuiltSegment>> {
    let new_graph = |local: usize| {
        Graph::new(BuildParams {
            seed: segment_seed(params.seed, worker, local),
            ..params
        })
    };
    let mut done = Vec::new();
    let mut graph = new_graph(0)?;
    for (docid, v) in rx {
        if segment_size.is_some_and(|cap| graph.len() >= cap) {
            let local = done.len();
            let full = std::mem::replace(&mut graph, new_graph(local + 1)?);
            done.push(BuiltSegment { worker, local, graph: full });
        }
        graph.insert(docid, v)?;
    }
    if !graph.is_empty() {
        let local = done.len();
        done.push(BuiltSegment { worker, local, graph });
    }
    Ok(done)
}

fn write_segment(dir: &Path, id: u32, graph: &Graph) -> Result<SegmentDescriptor> {
    let bytes = segment::encode(graph)?;
    let file = segment_file_name(id);
    let tmp = dir.join(format!("{file}.tmp"));
    {
        use std::io::Write;
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(&file))?;
    Ok(SegmentDescriptor {
        id,
        file,
        doc_count: graph.len(),
        checksum: segment::checksum(&bytes),
    })
}

/// Builds a new index at `dir` from a stream of documents.
///
/// Documents are dealt round-robin to `opts.threads` builders; each builder
/// owns its graphs exclusively. Segment ids are assigned in
/// `(local segment, worker)` order once every builder has finished.
pub fn ingest<I>(collection: I, params: BuildParams, opts: IngestOptions, dir: &Path) -> Result<IndexManifest>
where
    I: IntoIterator<Item = Result<(String, Vector)>>,
{
    params.validate()?;
    if opts.threads == 0 {
        return Err(Error::InvalidParams("threads must be >= 1".into()));
    }
    if opts.segment_size == Some(0) {
        return Err(Error::InvalidParams("segment size must be >= 1".into()));
    }
    fs::create_dir_all(dir)?;
    if dir.join(MANIFEST_FILE).exists() {
        return Err(Error::IndexExists(dir.to_path_buf()));
    }
    let _lock = IndexLock::acquire(dir)?;

    let mut seen = HashSet::new();
    let mut dim = None;
    let mut count = 0usize;

    let (mut built, feed_result) = thread::scope(|scope| {
        let mut senders = Vec::with_capacity(opts.threads);
        let mut handles = Vec::with_capacity(opts.threads);
        for worker in 0..opts.threads {
            let (tx, rx) = mpsc::sync_channel::<(String, Vector)>(1024);
            senders.push(tx);
            handles.push(scope.spawn(move || build_worker(worker, params, opts.segment_size, rx)));
        }

        let feed = (|| -> Result<()> {
            for item in collection {
                let (docid, v) = item?;
                match dim {
                    None => dim = Some(v.dim()),
                    Some(d) if d != v.dim() => {
                        return Err(Error::Dimension {
                            expected: d,
                            found: v.dim(),
                        })
                    }
                    _ => {}
                }
                if params.metric == Metric::Cosine && l2_norm(&v) <= ZERO_NORM_EPSILON {
                    return Err(Error::ZeroNorm);
                }
                if !seen.insert(docid.clone()) {
                    return Err(Error::DuplicateDoc(docid));
                }
                // A closed channel means the worker failed; its error surfaces at join.
                if senders[count % opts.threads].send((docid, v)).is_err() {
                    break;
                }
                count += 1;
            }
            Ok(())
        })();
        drop(senders);

        let mut built = Vec::new();
        let mut worker_err = None;
        for h in handles {
            match h.join().expect("segment builder panicked") {
                Ok(segs) => built.extend(segs),
                Err(e) => worker_err = worker_err.or(Some(e)),
            }
        }
        let result = feed.and(worker_err.map_or(Ok(()), Err));
        (built, result)
    });
    feed_result?;
    if count == 0 {
        return Err(Error::EmptyCorpus);
    }

    built.sort_by_key(|s| (s.local, s.worker));
    let mut segments = Vec::with_capacity(built.len());
    for (id, seg) in built.iter().enumerate() {
        segments.push(write_segment(dir, id as u32, &seg.graph)?);
    }
    let mut manifest = IndexManifest {
        format_version: FORMAT_VERSION,
        metric: params.metric,
        dim: dim.unwrap_or(0),
        build_params: params,
        segments,
        optimized: false,
        created_at: 0,
    };
    manifest.touch();
    debug_assert_eq!(manifest.doc_count(), count);
    manifest.write_atomic(dir)?;
    Ok(manifest)
}

/// A read-only, fully loaded index.
#[derive(Debug, Clone)]
pub struct Index {
    dir: PathBuf,
    manifest: IndexManifest,
    segments: Vec<Graph>,
}

pub fn open_index(dir: &Path) -> Result<Index> {
    Index::open(dir)
}

impl Index {
    pub fn open(dir: &Path) -> Result<Self> {
        let manifest = IndexManifest::read(dir)?;
        let segments = manifest
            .segments
            .iter()
            .map(|d| {
                let g = segment::read(&dir.join(&d.file), d.checksum)?;
                if g.len() != d.doc_count || g.dim() != manifest.dim {
                    return Err(Error::Corrupt(format!("segment {} disagrees with manifest", d.file)));
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut all = HashSet::new();
        for g in &segments {
            for id in g.docids() {
                if !all.insert(id.as_str()) {
                    return Err(Error::DuplicateDoc(id.clone()));
                }
            }
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest,
            segments,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &IndexManifest {
        &self.manifest
    }

    pub fn segments(&self) -> &[Graph] {
        &self.segments
    }

    pub fn doc_count(&self) -> usize {
        self.segments.iter().map(Graph::len).sum()
    }

    pub fn dim(&self) -> usize {
        self.manifest.dim
    }

    pub fn metric(&self) -> Metric {
        self.manifest.metric
    }

    /// Normalizes a query when the index uses cosine similarity.
    pub fn prepare_query(&self, q: Vector) -> Result<Vector> {
        self.metric().prepare(q)
    }

    /// Runs `knn_search` on every segment with the same parameters and merges
    /// the per-segment lists by score, ties by docid.
    pub fn search(&self, q: &Vector, params: SearchParams) -> Result<Vec<ScoredDoc>> {
        params.validate()?;
        if self.doc_count() == 0 {
            return Err(Error::EmptyIndex);
        }
        let mut merged = Vec::with_capacity(params.k * self.segments.len());
        for g in &self.segments {
            merged.extend(g.knn_search(q, params)?);
        }
        Ok(top_k(merged, params.k))
    }

    /// Exact top-k over every stored vector.
    pub fn exact_search(&self, q: &Vector, k: usize) -> Result<Vec<ScoredDoc>> {
        if self.doc_count() == 0 {
            return Err(Error::EmptyIndex);
        }
        if q.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: q.dim(),
            });
        }
        let mut scored = Vec::with_capacity(self.doc_count());
        for g in &self.segments {
            for (row, id) in g.raw_vectors().chunks_exact(g.dim()).zip(g.docids()) {
                scored.push(ScoredDoc::new(id.clone(), dot_slice(row, q.as_slice())));
            }
        }
        Ok(top_k(scored, k))
    }

    /// Every stored `(docid, vector)` pair, in segment then node order.
    pub fn documents(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.segments.iter().flat_map(|g| {
            g.docids()
                .iter()
                .zip(g.raw_vectors().chunks_exact(g.dim().max(1)))
                .map(|(id, row)| (id.as_str(), row))
        })
    }
}

pub fn multi_segment_search(index: &Index, q: &Vector, params: SearchParams) -> Result<Vec<ScoredDoc>> {
    index.search(q, params)
}

/// Merges every segment into one by re-inserting all vectors, in ascending
/// docid order, into a fresh graph.
///
/// The new graph uses `params` with the seed policy of ingest's first segment.
/// `threads` bounds the workers used to load and verify the old segments.
/// An already-optimized index only gets its manifest timestamp refreshed.
pub fn optimize(dir: &Path, params: BuildParams, threads: usize) -> Result<IndexManifest> {
    use rayon::prelude::*;

    params.validate()?;
    let _lock = IndexLock::acquire(dir)?;
    let mut manifest = IndexManifest::read(dir)?;
    if manifest.optimized {
        manifest.touch();
        manifest.write_atomic(dir)?;
        return Ok(manifest);
    }
    if params.metric != manifest.metric {
        return Err(Error::InvalidParams(format!(
            "cannot optimize a {} index with {} parameters",
            manifest.metric, params.metric
        )));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let old: Vec<Graph> = pool.install(|| {
        manifest
            .segments
            .par_iter()
            .map(|d| segment::read(&dir.join(&d.file), d.checksum))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut docs: Vec<(&str, &[f32])> = old
        .iter()
        .flat_map(|g| {
            g.docids()
                .iter()
                .zip(g.raw_vectors().chunks_exact(g.dim()))
                .map(|(id, row)| (id.as_str(), row))
        })
        .collect();
    docs.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let mut graph = Graph::new(BuildParams {
        seed: segment_seed(params.seed, 0, 0),
        ..params
    })?;
    for (id, row) in &docs {
        graph.insert(*id, Vector::new(row.to_vec())?)?;
    }
    if graph.len() != manifest.doc_count() {
        return Err(Error::Corrupt("document count changed during optimize".into()));
    }

    let new_id = manifest.segments.iter().map(|s| s.id).max().map_or(0, |m| m + 1);
    let desc = write_segment(dir, new_id, &graph)?;
    let old_files: Vec<String> = manifest.segments.iter().map(|s| s.file.clone()).collect();
    manifest.segments = vec![desc];
    manifest.optimized = true;
    manifest.build_params = params;
    manifest.touch();
    manifest.write_atomic(dir)?;
    for f in old_files {
        let _ = fs::remove_file(dir.join(f));
    }
    Ok(manifest)
}

/// Total size in bytes of every file under `dir`.
pub fn index_size_bytes(dir: &Path) -> Result<u64> {
    let mut total = 0;
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let meta = entry.metadata()?;
        if meta.is_dir() {
            total += index_size_bytes(&entry.path())?;
        } else {
            total += meta.len();
        }
    }
    Ok(total)
}
