use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Metric;

/// Graph construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildParams {
    /// Links per node created at insertion; also the degree cap above layer 0.
    #[serde(rename = "M")]
    pub m: usize,
    /// Candidate-list size while searching for a new node's neighbors.
    #[serde(rename = "efConstruction")]
    pub ef_construction: usize,
    /// Seed for the level generator.
    pub seed: u64,
    pub metric: Metric,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            m: 16,
            ef_construction: 100,
            seed: 42,
            metric: Metric::Cosine,
        }
    }
}

impl BuildParams {
    pub fn new(m: usize, ef_construction: usize, seed: u64, metric: Metric) -> Result<Self> {
        let p = Self {
            m,
            ef_construction,
            seed,
            metric,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidParams(format!("M must be >= 2, got {}", self.m)));
        }
        if self.ef_construction < self.m {
            return Err(Error::InvalidParams(format!(
                "efConstruction ({}) must be >= M ({})",
                self.ef_construction, self.m
            )));
        }
        if self.m > u16::MAX as usize {
            return Err(Error::InvalidParams(format!("M too large: {}", self.m)));
        }
        Ok(())
    }

    /// Degree cap at `layer`: `2·M` at the base layer, `M` above it.
    pub fn max_links(&self, layer: usize) -> usize {
        if layer == 0 {
            2 * self.m
        } else {
            self.m
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub ef_search: usize,
    pub k: usize,
}

impl SearchParams {
    pub fn new(ef_search: usize, k: usize) -> Result<Self> {
        let p = Self { ef_search, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParams("k must be >= 1".into()));
        }
        if self.ef_search < self.k {
            return Err(Error::InvalidParams(format!(
                "efSearch ({}) must be >= k ({})",
                self.ef_search, self.k
            )));
        }
        Ok(())
    }
}
