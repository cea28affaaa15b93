//! Benchmark harness: an N:1 mailbox stress run and a multi-ring token
//! benchmark with respawning chains and a CPU-bound factorization load.

mod mailbox;
mod ring;

use std::fmt;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

pub use mailbox::{run_mailbox_bench, MailboxBenchConfig, MailboxOutcome};
pub use ring::{run_ring_bench, RingBenchConfig, RingCounts, RingOutcome, DEFAULT_FACTOR_TARGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("prime factorization needs n >= 2, got {0}")]
    Domain(u64),
    #[error("benchmark did not finish within {0:?}")]
    Timeout(std::time::Duration),
}

/// One benchmark run. Serialized as a JSON line or a CSV record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    /// Seconds.
    pub wall_time: f64,
    pub messages_processed: u64,
    pub actors_created: u64,
    pub peak_concurrent_actors: u64,
    pub pool_size: usize,
    /// Bytes, when the platform reports it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_rss: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl BenchReport {
    pub fn write_to(&self, format: ReportFormat, out: impl Write) -> std::io::Result<()> {
        match format {
            ReportFormat::Json => {
                let mut out = out;
                serde_json::to_writer(&mut out, self)?;
                writeln!(out)
            }
            ReportFormat::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .has_headers(false)
                    .from_writer(out);
                w.write_record([
                    "wall_time",
                    "messages_processed",
                    "actors_created",
                    "peak_concurrent_actors",
                    "pool_size",
                    "peak_rss",
                ])?;
                w.serialize((
                    self.wall_time,
                    self.messages_processed,
                    self.actors_created,
                    self.peak_concurrent_actors,
                    self.pool_size,
                    self.peak_rss,
                ))?;
                w.flush()
            }
        }
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.3}s, {} messages, {} actors created, peak {} concurrent, pool {}",
            self.wall_time,
            self.messages_processed,
            self.actors_created,
            self.peak_concurrent_actors,
            self.pool_size
        )?;
        if let Some(rss) = self.peak_rss {
            write!(f, ", peak rss {} KiB", rss / 1024)?;
        }
        Ok(())
    }
}

/// Prime factors of `n` in ascending order, with multiplicity, by trial
/// division.
pub fn prime_factors(mut n: u64) -> Result<Vec<u64>, BenchError> {
    if n < 2 {
        return Err(BenchError::Domain(n));
    }
    let mut out = Vec::new();
    while n.is_multiple_of(2) {
        out.push(2);
        n /= 2;
    }
    let mut d = 3u64;
    while d <= n / d {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 2;
    }
    if n > 1 {
        out.push(n);
    }
    Ok(out)
}

/// Peak resident set size of this process, where available.
pub fn peak_rss() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}
