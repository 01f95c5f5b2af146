use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::tokenize;

pub const SPARSE_BIN: &str = "sparse.bin";
pub const SPARSE_HEADER: &str = "sparse.json";
const MAGIC: &[u8; 8] = b"BM25IDX1";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermStats {
    pub df: u32,
    /// Start of the term's postings in the shared postings array.
    pub offset: usize,
}

/// In-memory inverted index with the statistics BM25 needs.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    lexicon: BTreeMap<String, TermStats>,
    postings: Vec<Posting>,
    doc_lens: Vec<u32>,
    docids: Vec<String>,
    avgdl: f64,
}

/// JSON stats header written next to the binary postings file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Header {
    format_version: u32,
    num_docs: usize,
    num_terms: usize,
    num_postings: usize,
    avgdl: f64,
    checksum: u32,
}

/// Builds an index from `(docid, text)` pairs. Internal ids follow input order.
pub fn build_inverted_index<I, D, T>(corpus: I) -> Result<InvertedIndex>
where
    I: IntoIterator<Item = (D, T)>,
    D: Into<String>,
    T: AsRef<str>,
{
    let mut docids = Vec::new();
    let mut seen = HashMap::new();
    let mut doc_lens = Vec::new();
    let mut per_term: BTreeMap<String, Vec<Posting>> = BTreeMap::new();

    for (docid, text) in corpus {
        let docid = docid.into();
        let doc = docids.len() as u32;
        if seen.insert(docid.clone(), doc).is_some() {
            return Err(Error::DuplicateDoc(docid));
        }
        let tokens = tokenize(text.as_ref());
        doc_lens.push(tokens.len() as u32);
        let mut tfs: BTreeMap<String, u32> = BTreeMap::new();
        for t in tokens {
            *tfs.entry(t).or_default() += 1;
        }
        for (term, tf) in tfs {
            per_term.entry(term).or_default().push(Posting { doc, tf });
        }
        docids.push(docid);
    }

    let mut lexicon = BTreeMap::new();
    let mut postings = Vec::new();
    for (term, list) in per_term {
        lexicon.insert(
            term,
            TermStats {
                df: list.len() as u32,
                offset: postings.len(),
            },
        );
        postings.extend(list);
    }
    let avgdl = mean(&doc_lens);
    Ok(InvertedIndex {
        lexicon,
        postings,
        doc_lens,
        docids,
        avgdl,
    })
}

fn mean(lens: &[u32]) -> f64 {
    if lens.is_empty() {
        0.0
    } else {
        lens.iter().map(|&l| l as f64).sum::<f64>() / lens.len() as f64
    }
}

impl InvertedIndex {
    pub fn num_docs(&self) -> usize {
        self.docids.len()
    }

    pub fn num_terms(&self) -> usize {
        self.lexicon.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn doc_len(&self, doc: u32) -> u32 {
        self.doc_lens[doc as usize]
    }

    pub fn docid(&self, doc: u32) -> &str {
        &self.docids[doc as usize]
    }

    pub fn df(&self, term: &str) -> u32 {
        self.lexicon.get(term).map_or(0, |s| s.df)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        match self.lexicon.get(term) {
            Some(s) => &self.postings[s.offset..s.offset + s.df as usize],
            None => &[],
        }
    }

    pub fn tf(&self, term: &str, docid: &str) -> u32 {
        self.postings(term)
            .iter()
            .find(|p| self.docid(p.doc) == docid)
            .map_or(0, |p| p.tf)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, TermStats)> {
        self.lexicon.iter().map(|(t, s)| (t.as_str(), *s))
    }

    /// Writes `sparse.bin` and its `sparse.json` header into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.write_u32::<LittleEndian>(VERSION)?;
        out.write_u32::<LittleEndian>(self.docids.len() as u32)?;
        for (id, len) in self.docids.iter().zip(&self.doc_lens) {
            write_str(&mut out, id)?;
            out.write_u32::<LittleEndian>(*len)?;
        }
        out.write_u32::<LittleEndian>(self.lexicon.len() as u32)?;
        for (term, stats) in &self.lexicon {
            write_str(&mut out, term)?;
            out.write_u32::<LittleEndian>(stats.df)?;
            for p in &self.postings[stats.offset..stats.offset + stats.df as usize] {
                out.write_u32::<LittleEndian>(p.doc)?;
                out.write_u32::<LittleEndian>(p.tf)?;
            }
        }
        let header = Header {
            format_version: VERSION,
            num_docs: self.num_docs(),
            num_terms: self.num_terms(),
            num_postings: self.postings.len(),
            avgdl: self.avgdl,
            checksum: crc32fast::hash(&out),
        };
        let mut f = fs::File::create(dir.join(SPARSE_BIN))?;
        f.write_all(&out)?;
        f.sync_all()?;
        fs::write(dir.join(SPARSE_HEADER), serde_json::to_string_pretty(&header)? + "\n")?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let header: Header = serde_json::from_str(&fs::read_to_string(dir.join(SPARSE_HEADER))?)?;
        if header.format_version > VERSION {
            return Err(Error::FormatVersion {
                found: header.format_version,
                supported: VERSION,
            });
        }
        let path = dir.join(SPARSE_BIN);
        let bytes = fs::read(&path)?;
        if crc32fast::hash(&bytes) != header.checksum {
            return Err(Error::Checksum { file: path });
        }
        let trunc = |_| Error::Corrupt("sparse index truncated".into());
        let mut r = Cursor::new(bytes.as_slice());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(trunc)?;
        if &magic != MAGIC {
            return Err(Error::Corrupt("bad sparse index magic".into()));
        }
        r.read_u32::<LittleEndian>().map_err(trunc)?;
        let n = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        let mut docids = Vec::with_capacity(n);
        let mut doc_lens = Vec::with_capacity(n);
        for _ in 0..n {
            docids.push(read_str(&mut r)?);
            doc_lens.push(r.read_u32::<LittleEndian>().map_err(trunc)?);
        }
        let terms = r.read_u32::<LittleEndian>().map_err(trunc)? as usize;
        let mut lexicon = BTreeMap::new();
        let mut postings = Vec::with_capacity(header.num_postings);
        for _ in 0..terms {
            let term = read_str(&mut r)?;
            let df = r.read_u32::<LittleEndian>().map_err(trunc)?;
            let offset = postings.len();
            for _ in 0..df {
                let doc = r.read_u32::<LittleEndian>().map_err(trunc)?;
                let tf = r.read_u32::<LittleEndian>().map_err(trunc)?;
                if doc as usize >= n {
                    return Err(Error::Corrupt(format!("posting for `{term}` references doc {doc}")));
                }
                postings.push(Posting { doc, tf });
            }
            lexicon.insert(term, TermStats { df, offset });
        }
        Ok(Self {
            avgdl: mean(&doc_lens),
            lexicon,
            postings,
            doc_lens,
            docids,
        })
    }
}

fn write_str(out: &mut Vec<u8>, s: &str) -> Result<()> {
    out.write_u32::<LittleEndian>(s.len() as u32)?;
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

fn read_str(r: &mut Cursor<&[u8]>) -> Result<String> {
    let len = r
        .read_u32::<LittleEndian>()
        .map_err(|_| Error::Corrupt("sparse index truncated".into()))? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Corrupt("sparse index truncated".into()))?;
    String::from_utf8(buf).map_err(|_| Error::Corrupt("sparse index string is not UTF-8".into()))
}
