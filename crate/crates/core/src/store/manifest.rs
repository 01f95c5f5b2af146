use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hnsw::BuildParams;
use crate::vector::Metric;

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SegmentDescriptor {
    pub id: u32,
    pub file: String,
    pub doc_count: usize,
    /// CRC-32 of the whole segment file.
    pub checksum: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexManifest {
    pub format_version: u32,
    pub metric: Metric,
    pub dim: usize,
    pub build_params: BuildParams,
    pub segments: Vec<SegmentDescriptor>,
    pub optimized: bool,
    /// Seconds since the Unix epoch at which this manifest was written.
    pub created_at: u64,
}

impl IndexManifest {
    pub fn doc_count(&self) -> usize {
        self.segments.iter().map(|s| s.doc_count).sum()
    }

    pub(crate) fn touch(&mut self) {
        self.created_at = now();
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path)?;
        // Version first, so a future schema reports a version error rather
        // than a field error.
        let raw: serde_json::Value = serde_json::from_str(&text)?;
        let version = raw
            .get("formatVersion")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Corrupt("manifest lacks formatVersion".into()))?;
        if version > FORMAT_VERSION as u64 {
            return Err(Error::FormatVersion {
                found: version.min(u32::MAX as u64) as u32,
                supported: FORMAT_VERSION,
            });
        }
        let manifest: IndexManifest = serde_json::from_value(raw)?;
        if manifest.optimized && manifest.segments.len() != 1 {
            return Err(Error::Corrupt("optimized manifest must list exactly one segment".into()));
        }
        Ok(manifest)
    }

    /// Writes to a temporary file and renames it into place.
    pub fn write_atomic(&self, dir: &Path) -> Result<()> {
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(serde_json::to_string_pretty(self)?.as_bytes())?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, dir.join(MANIFEST_FILE))?;
        Ok(())
    }
}

pub(crate) fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
