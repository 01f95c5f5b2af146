//! Inter-query parallel execution and throughput reports.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-size pool of query workers. Each worker runs whole queries;
/// results come back in input order regardless of the thread count.
pub struct QueryPool {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl QueryPool {
    pub fn new(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::InvalidParams("threads must be >= 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        Ok(Self { pool, threads })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }

    /// Like [`map`](Self::map), also returning per-item latency in
    /// milliseconds and the wall time of the whole pass in seconds.
    pub fn timed_map<T, R, F>(&self, items: &[T], f: F) -> (Vec<R>, Vec<f64>, f64)
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync,
    {
        let start = Instant::now();
        let pairs: Vec<(R, f64)> = self.pool.install(|| {
            items
                .par_iter()
                .map(|item| {
                    let t = Instant::now();
                    let r = f(item);
                    (r, t.elapsed().as_secs_f64() * 1e3)
                })
                .collect()
        });
        let wall = start.elapsed().as_secs_f64();
        let (results, latencies) = pairs.into_iter().unzip();
        (results, latencies, wall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyQuantiles {
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub query_count: usize,
    pub total_wall_seconds: f64,
    pub qps: f64,
    /// Milliseconds.
    pub per_query_latency_quantiles: LatencyQuantiles,
    pub threads: usize,
    pub ef_search: usize,
    pub index_path: String,
}

/// Nearest-rank quantile of an ascending slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl BenchReport {
    pub fn from_measurements(
        latencies_ms: &[f64],
        total_wall_seconds: f64,
        threads: usize,
        ef_search: usize,
        index_path: impl Into<String>,
    ) -> Self {
        let mut sorted = latencies_ms.to_vec();
        sorted.sort_by(f64::total_cmp);
        let query_count = sorted.len();
        let qps = if query_count > 0 && total_wall_seconds > 0.0 {
            query_count as f64 / total_wall_seconds
        } else {
            0.0
        };
        Self {
            query_count,
            total_wall_seconds,
            qps,
            per_query_latency_quantiles: LatencyQuantiles {
                p50: quantile(&sorted, 0.50),
                p95: quantile(&sorted, 0.95),
                p99: quantile(&sorted, 0.99),
            },
            threads,
            ef_search,
            index_path: index_path.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.per_query_latency_quantiles;
        let rows = [
            ("index", self.index_path.clone()),
            ("efSearch", self.ef_search.to_string()),
            ("threads", self.threads.to_string()),
            ("queries", self.query_count.to_string()),
            ("wall (s)", format!("{:.3}", self.total_wall_seconds)),
            ("QPS", format!("{:.1}", self.qps)),
            ("p50 (ms)", format!("{:.3}", q.p50)),
            ("p95 (ms)", format!("{:.3}", q.p95)),
            ("p99 (ms)", format!("{:.3}", q.p99)),
        ];
        for (k, v) in rows {
            writeln!(f, "{k:<10} {v:>12}")?;
        }
        Ok(())
    }
}

/// Runs `warmup` untimed passes, then `repeats` timed passes over `queries`.
pub fn run_bench<T, R, F>(
    pool: &QueryPool,
    queries: &[T],
    warmup: usize,
    repeats: usize,
    f: F,
) -> (Vec<f64>, f64)
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    for _ in 0..warmup {
        pool.map(queries, &f);
    }
    let mut latencies = Vec::with_capacity(queries.len() * repeats);
    let mut wall = 0.0;
    for _ in 0..repeats {
        let (_, lat, w) = pool.timed_map(queries, &f);
        latencies.extend(lat);
        wall += w;
    }
    (latencies, wall)
}
