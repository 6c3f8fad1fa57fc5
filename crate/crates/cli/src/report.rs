//! Run reports, one JSON object per line.

use std::io::{BufRead, Write};

use abcd::purge::{AbcdResult, Criterion, Profile, TopK};
use abcd::GraphStats;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub iterations: u64,
    /// As requested: `"auto"` or a number.
    pub top_k: TopK,
    /// The K actually used.
    pub top_k_resolved: usize,
    pub criterion: Criterion,
    pub seed: u64,
    pub profile: Profile,
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub ingest: f64,
    pub lcc: f64,
    pub phase1: f64,
    pub phase2: f64,
    pub verify: f64,
}

impl Timing {
    pub fn total(&self) -> f64 {
        self.ingest + self.lcc + self.phase1 + self.phase2 + self.verify
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: String,
    pub raw_stats: GraphStats,
    pub lcc_stats: GraphStats,
    pub params: ReportParams,
    pub winner_size: usize,
    pub winner_state_index: Option<usize>,
    pub winner_labels: Vec<String>,
    pub per_state_sizes: Vec<usize>,
    pub min_frustration: Option<usize>,
    pub max_frustration: Option<usize>,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn from_result(
        dataset: String,
        raw_stats: GraphStats,
        lcc_stats: GraphStats,
        requested_top_k: TopK,
        profile: Profile,
        result: &AbcdResult,
    ) -> Self {
        Self {
            dataset,
            raw_stats,
            lcc_stats,
            params: ReportParams {
                iterations: result.iterations,
                top_k: requested_top_k,
                top_k_resolved: result.top_k,
                criterion: result.criterion,
                seed: result.seed,
                profile,
            },
            winner_size: result.winner.size(),
            winner_state_index: result.winner_state_index,
            winner_labels: result.winner.labels(),
            per_state_sizes: result.per_state_sizes.clone(),
            min_frustration: result.min_frustration,
            max_frustration: result.max_frustration,
            verified: false,
            timing: None,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: |V|={} |E|={} lcc={} criterion={} I={} K={} seed={} -> winner {} (frustration {}..{})",
            self.dataset,
            self.raw_stats.vertices,
            self.raw_stats.edges,
            self.lcc_stats.vertices,
            self.params.criterion,
            self.params.iterations,
            self.params.top_k_resolved,
            self.params.seed,
            self.winner_size,
            fmt_opt(self.min_frustration),
            fmt_opt(self.max_frustration),
        );
        if let Some(t) = &self.timing {
            s.push_str(&format!(" in {:.3}s", t.total()));
        }
        s
    }
}

fn fmt_opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn write_reports<'a, W: Write>(
    reports: impl IntoIterator<Item = &'a RunReport>,
    mut out: W,
) -> std::io::Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_line())?;
    }
    out.flush()
}

pub fn read_reports<R: BufRead>(reader: R) -> Result<Vec<RunReport>, CliError> {
    let mut reports = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let report = serde_json::from_str(&line).map_err(|e| CliError::Data(format!("report line {}: {e}", i + 1)))?;
        reports.push(report);
    }
    Ok(reports)
}
