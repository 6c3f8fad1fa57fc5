use std::path::Path;
use std::time::Instant;

use abcd::ingest::{self, SourceFormat};
use abcd::purge::{run_abcd, AbcdParams, Criterion, Profile, TopK};
use abcd::verify::{oracle_max_balanced, verify_result, verify_vertex_set, BalanceReport, VerificationReport};
use abcd::{GraphStats, SignedGraph, VertexId};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::report::{RunReport, Timing};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub criterion: Criterion,
    /// Falls back to the profile's iteration count.
    pub iterations: Option<u64>,
    pub top_k: TopK,
    pub seed: u64,
    pub profile: Profile,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            criterion: Criterion::Harary,
            iterations: None,
            top_k: TopK::Auto,
            seed: 0,
            profile: Profile::Paper,
            timing: true,
        }
    }
}

impl RunOptions {
    pub fn params(&self) -> AbcdParams {
        AbcdParams {
            iterations: self.iterations.unwrap_or(self.profile.iterations()),
            top_k: self.top_k,
            criterion: self.criterion,
            seed: self.seed,
            profile: self.profile,
        }
    }
}

pub fn load_graph(path: &Path, format: SourceFormat) -> Result<SignedGraph, CliError> {
    Ok(ingest::load(path, format)?.to_graph())
}

pub fn dataset_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn describe_violation(g: &SignedGraph, report: &VerificationReport) -> String {
    match report.balance {
        BalanceReport::Unbalanced { edge } => {
            let e = g.edge(edge);
            format!("edge {} - {} ({}) closes a negative cycle", g.label(e.u), g.label(e.v), e.sign)
        }
        BalanceReport::Balanced { .. } if !report.connected => "sub-graph is disconnected".to_string(),
        BalanceReport::Balanced { .. } => "ok".to_string(),
    }
}

/// Runs the pipeline on an already loaded graph and verifies the winner.
pub fn run_graph(
    g: &SignedGraph,
    dataset: String,
    opts: &RunOptions,
    ingest_seconds: f64,
) -> Result<RunReport, CliError> {
    let lcc_stats = g.largest_connected_component().0.stats();
    let result = run_abcd(g, &opts.params())?;

    let t = Instant::now();
    let check = verify_result(g, &result)?;
    let verify_seconds = t.elapsed().as_secs_f64();
    if !check.passed() {
        return Err(CliError::Verification(describe_violation(g, &check)));
    }

    let mut report = RunReport::from_result(dataset, g.stats(), lcc_stats, opts.top_k, opts.profile, &result);
    report.verified = true;
    if opts.timing {
        report.timing = Some(Timing {
            ingest: ingest_seconds,
            lcc: result.timings.lcc_seconds,
            phase1: result.timings.phase1_seconds,
            phase2: result.timings.phase2_seconds,
            verify: verify_seconds,
        });
    }
    Ok(report)
}

pub fn cmd_run(path: &Path, format: SourceFormat, opts: &RunOptions) -> Result<RunReport, CliError> {
    let t = Instant::now();
    let g = load_graph(path, format)?;
    run_graph(&g, dataset_name(path), opts, t.elapsed().as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub dataset: String,
    pub raw: GraphStats,
    pub lcc: GraphStats,
}

impl StatsRecord {
    pub fn summary(&self) -> String {
        let row = |name: &str, s: &GraphStats| {
            format!(
                "{name:>4}: |V|={} |E|={} components={} cycles={} density={:.3e} neg={:.1}% deg avg={:.2} median={} max={}",
                s.vertices,
                s.edges,
                s.components,
                s.cycle_space_dimension,
                s.density,
                100.0 * s.negative_fraction,
                s.degree_avg,
                s.degree_median,
                s.degree_max,
            )
        };
        format!("{}\n{}\n{}", self.dataset, row("raw", &self.raw), row("lcc", &self.lcc))
    }
}

pub fn graph_stats(g: &SignedGraph, dataset: String) -> StatsRecord {
    StatsRecord { dataset, raw: g.stats(), lcc: g.largest_connected_component().0.stats() }
}

pub fn cmd_stats(path: &Path, format: SourceFormat) -> Result<StatsRecord, CliError> {
    Ok(graph_stats(&load_graph(path, format)?, dataset_name(path)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub size: usize,
    pub connected: bool,
    pub labels: Vec<String>,
}

pub fn cmd_oracle(path: &Path, format: SourceFormat, connected: bool) -> Result<OracleRecord, CliError> {
    let g = load_graph(path, format)?;
    let outcome = oracle_max_balanced(&g, connected)?;
    Ok(OracleRecord { size: outcome.size, connected, labels: outcome.vertices.iter().map(|&v| g.label(v)).collect() })
}

/// Checks one report against the graph it claims to describe.
pub fn verify_report(g: &SignedGraph, report: &RunReport) -> Result<(), CliError> {
    if report.winner_labels.len() != report.winner_size {
        return Err(CliError::Verification(format!(
            "{}: winner_size {} but {} labels listed",
            report.dataset,
            report.winner_size,
            report.winner_labels.len()
        )));
    }
    let index = g.vertex_by_label();
    let vertices = report
        .winner_labels
        .iter()
        .map(|l| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| CliError::Verification(format!("{}: vertex `{l}` is not in the graph", report.dataset)))
        })
        .collect::<Result<Vec<VertexId>, _>>()?;
    let check =
        verify_vertex_set(g, &vertices).map_err(|e| CliError::Verification(format!("{}: {e}", report.dataset)))?;
    if !check.passed() {
        return Err(CliError::Verification(format!("{}: {}", report.dataset, describe_violation(g, &check))));
    }
    Ok(())
}

pub fn cmd_verify(graph: &Path, format: SourceFormat, reports: &[RunReport]) -> Result<usize, CliError> {
    let g = load_graph(graph, format)?;
    for r in reports {
        verify_report(&g, r)?;
    }
    Ok(reports.len())
}
