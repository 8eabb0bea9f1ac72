//! Provenance headers and deterministic CSV formatting.
//!
//! Result files open with `#`-prefixed provenance lines (tool version, full
//! argument vector, seed). Wall-clock information — the header timestamp and
//! the per-row seconds column — appears only when timestamps are enabled, so
//! that default output is byte-identical across reruns of one configuration.

use std::time::{SystemTime, UNIX_EPOCH};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `#` header lines recording how a file was produced.
pub fn provenance_header(command: &str, args: &[String], seed: Option<u64>, timestamps: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("# psdpack {command} v{TOOL_VERSION}\n"));
    out.push_str(&format!("# args: {}\n", args.join(" ")));
    if let Some(seed) = seed {
        out.push_str(&format!("# seed: {seed}\n"));
        out.push_str(&format!("# sampler: {}\n", psdpack::symmat::sampler_id()));
    }
    if timestamps {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.push_str(&format!("# timestamp: {now}\n"));
    }
    out
}

/// One fig1 result row.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub method: String,
    pub n: usize,
    pub s: usize,
    pub count: usize,
    pub trial: usize,
    pub error: f64,
    pub converged: bool,
    pub seconds: f64,
}

pub const FIG1_HEADER: &str = "method,n,s,N,trial,error,converged,seconds";

impl ResultRow {
    /// Fixed column order; `seconds` prints as 0 unless timestamps are on.
    pub fn to_csv(&self, timestamps: bool) -> String {
        let seconds = if timestamps { self.seconds } else { 0.0 };
        format!(
            "{},{},{},{},{},{:.12e},{},{:.6}",
            self.method, self.n, self.s, self.count, self.trial, self.error, self.converged, seconds
        )
    }
}

/// One fig2 result row: minimal frame count reaching the threshold.
#[derive(Debug, Clone)]
pub struct RequirementRow {
    pub n: usize,
    pub s: usize,
    pub required: usize,
    pub capped: bool,
}

pub const FIG2_HEADER: &str = "n,s,N_required,capped";

impl RequirementRow {
    pub fn to_csv(&self) -> String {
        format!("{},{},{},{}", self.n, self.s, self.required, self.capped)
    }
}
