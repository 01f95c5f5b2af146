//! Binary segment files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        8 bytes  "HNSWSEG1"
//! version      u32
//! dim          u32
//! count        u32
//! metric       u8       0 = dot, 1 = cosine
//! M            u32
//! efC          u32
//! seed         u64
//! max_level    u32
//! entry_point  u32
//! vectors      count × dim × f32, row-major by internal id
//! levels       count × u8
//! id table     count × (node u32, offset u32, len u32), sorted by docid
//! blob_len     u32, then blob_len bytes of UTF-8 docids
//! adjacency    per level 0..=max_level:
//!                node count u32, then for each node at that level in
//!                ascending id: len u32, len × u32 neighbor ids
//! ```

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::hnsw::BuildParams;
use crate::vector::Metric;
use crate::Graph;

const MAGIC: &[u8; 8] = b"HNSWSEG1";
pub const SEGMENT_VERSION: u32 = 1;

/// Serializes a graph to bytes.
pub fn encode(graph: &Graph) -> Result<Vec<u8>> {
    let n = graph.len();
    let dim = graph.dim();
    let p = graph.params();
    let mut out = Vec::with_capacity(64 + n * dim * 4 + n * 40);
    out.extend_from_slice(MAGIC);
    out.write_u32::<LittleEndian>(SEGMENT_VERSION)?;
    out.write_u32::<LittleEndian>(dim as u32)?;
    out.write_u32::<LittleEndian>(n as u32)?;
    out.write_u8(p.metric.code())?;
    out.write_u32::<LittleEndian>(p.m as u32)?;
    out.write_u32::<LittleEndian>(p.ef_construction as u32)?;
    out.write_u64::<LittleEndian>(p.seed)?;
    out.write_u32::<LittleEndian>(graph.max_level() as u32)?;
    out.write_u32::<LittleEndian>(graph.entry_point().unwrap_or(u32::MAX))?;

    for &x in graph.raw_vectors() {
        out.write_f32::<LittleEndian>(x)?;
    }
    for node in 0..n as u32 {
        let level = graph.node_level(node);
        let level = u8::try_from(level).map_err(|_| Error::Corrupt(format!("level {level} exceeds 255")))?;
        out.push(level);
    }

    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| graph.docid(a).cmp(graph.docid(b)));
    let mut blob = Vec::new();
    for &node in &order {
        let id = graph.docid(node).as_bytes();
        out.write_u32::<LittleEndian>(node)?;
        out.write_u32::<LittleEndian>(blob.len() as u32)?;
        out.write_u32::<LittleEndian>(id.len() as u32)?;
        blob.extend_from_slice(id);
    }
    let blob_len = u32::try_from(blob.len()).map_err(|_| Error::Corrupt("docid table exceeds 4 GiB".into()))?;
    out.write_u32::<LittleEndian>(blob_len)?;
    out.extend_from_slice(&blob);

    for layer in 0..=graph.max_level() {
        let nodes: Vec<u32> = (0..n as u32).filter(|&v| graph.node_level(v) >= layer).collect();
        out.write_u32::<LittleEndian>(nodes.len() as u32)?;
        for node in nodes {
            let nbs = graph.neighbors(node, layer);
            out.write_u32::<LittleEndian>(nbs.len() as u32)?;
            for &nb in nbs {
                out.write_u32::<LittleEndian>(nb)?;
            }
        }
    }
    Ok(out)
}

fn truncated(_: std::io::Error) -> Error {
    Error::Corrupt("segment file truncated".into())
}

/// Parses segment bytes back into a graph.
pub fn decode(bytes: &[u8]) -> Result<Graph> {
    let mut r = Cursor::new(bytes);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::Corrupt("bad segment magic".into()));
    }
    let version = r.read_u32::<LittleEndian>().map_err(truncated)?;
    if version > SEGMENT_VERSION {
        return Err(Error::FormatVersion {
            found: version,
            supported: SEGMENT_VERSION,
        });
    }
    let dim = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let n = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let metric = Metric::from_code(r.read_u8().map_err(truncated)?)
        .ok_or_else(|| Error::Corrupt("unknown metric code".into()))?;
    let m = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let ef_construction = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let seed = r.read_u64::<LittleEndian>().map_err(truncated)?;
    let max_level = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let entry = r.read_u32::<LittleEndian>().map_err(truncated)?;
    let params = BuildParams {
        m,
        ef_construction,
        seed,
        metric,
    };

    let remaining = bytes.len() as u64 - r.position();
    if (n as u64) * (dim as u64) * 4 > remaining {
        return Err(Error::Corrupt("segment file truncated".into()));
    }
    let mut data = vec![0f32; n * dim];
    r.read_f32_into::<LittleEndian>(&mut data).map_err(truncated)?;
    let mut levels = vec![0u8; n];
    r.read_exact(&mut levels).map_err(truncated)?;

    let mut table = Vec::with_capacity(n);
    for _ in 0..n {
        let node = r.read_u32::<LittleEndian>().map_err(truncated)?;
        let off = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
        let len = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
        table.push((node, off, len));
    }
    let blob_len = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let mut blob = vec![0u8; blob_len];
    r.read_exact(&mut blob).map_err(truncated)?;
    let mut docids: Vec<Option<String>> = vec![None; n];
    for (node, off, len) in table {
        let s = blob
            .get(off..off + len)
            .ok_or_else(|| Error::Corrupt("docid offset out of range".into()))?;
        let s = std::str::from_utf8(s).map_err(|_| Error::Corrupt("docid is not UTF-8".into()))?;
        let slot = docids
            .get_mut(node as usize)
            .ok_or_else(|| Error::Corrupt("id table node out of range".into()))?;
        *slot = Some(s.to_string());
    }
    let docids: Vec<String> = docids
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Corrupt("id table does not cover every node".into()))?;

    let mut links: Vec<Vec<Vec<u32>>> = levels.iter().map(|&l| vec![Vec::new(); l as usize + 1]).collect();
    #[allow(clippy::needless_range_loop)]
    for layer in 0..=max_level {
        let count = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
        let nodes = (0..n).filter(|&v| levels[v] as usize >= layer);
        let mut seen = 0;
        for node in nodes {
            let len = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            if len > params.max_links(layer) {
                return Err(Error::Corrupt(format!("node {node} exceeds degree cap at layer {layer}")));
            }
            let mut nbs = vec![0u32; len];
            r.read_u32_into::<LittleEndian>(&mut nbs).map_err(truncated)?;
            links[node][layer] = nbs;
            seen += 1;
        }
        if seen != count {
            return Err(Error::Corrupt(format!("layer {layer} node count mismatch")));
        }
    }
    if r.position() != bytes.len() as u64 {
        return Err(Error::Corrupt("trailing bytes after adjacency block".into()));
    }
    let entry_point = (entry != u32::MAX).then_some(entry);
    Graph::from_parts(params, dim, data, docids, links, entry_point)
}

pub fn checksum(bytes: &[u8]) -> u32 {
    crc32fast::hash(bytes)
}

/// Reads a segment file, verifying its CRC-32 against `expected`.
pub fn read(path: &Path, expected: u32) -> Result<Graph> {
    let bytes = std::fs::read(path)?;
    if checksum(&bytes) != expected {
        return Err(Error::Checksum {
            file: path.to_path_buf(),
        });
    }
    decode(&bytes)
}
