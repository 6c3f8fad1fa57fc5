//! Benchmark manifests: datasets crossed with criteria, iteration counts, K
//! values and seeds. Each cell yields one run report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use abcd::ingest::SourceFormat;
use abcd::purge::{Criterion, Profile, TopK};
use abcd::SignedGraph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{load_graph, run_graph, RunOptions};
use crate::error::CliError;
use crate::report::RunReport;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub criteria: Option<Vec<Criterion>>,
    pub iterations: Option<Vec<u64>>,
    pub top_k: Option<Vec<TopK>>,
    pub seeds: Option<Vec<u64>>,
}

impl Sweep {
    fn or(&self, fallback: &Sweep) -> Sweep {
        Sweep {
            criteria: self.criteria.clone().or_else(|| fallback.criteria.clone()),
            iterations: self.iterations.clone().or_else(|| fallback.iterations.clone()),
            top_k: self.top_k.clone().or_else(|| fallback.top_k.clone()),
            seeds: self.seeds.clone().or_else(|| fallback.seeds.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    pub format: SourceFormat,
    #[serde(flatten)]
    pub sweep: Sweep,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Manifest {
    pub repeats: Option<usize>,
    pub defaults: Sweep,
    #[serde(rename = "dataset")]
    pub datasets: Vec<DatasetEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        let mut m = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut m.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub profile: Profile,
    /// Overrides the manifest's `repeats`.
    pub repeats: Option<usize>,
    pub parallel: bool,
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { profile: Profile::Paper, repeats: None, parallel: false, timing: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellStatus {
    Ran { report: Box<RunReport> },
    Skipped { reason: String },
    Failed { error: String, exit_code: u8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub dataset: String,
    pub criterion: Criterion,
    pub iterations: u64,
    pub top_k: TopK,
    pub seed: u64,
    pub repeat: usize,
    #[serde(flatten)]
    pub status: CellStatus,
}

impl BenchCell {
    pub fn report(&self) -> Option<&RunReport> {
        match &self.status {
            CellStatus::Ran { report } => Some(report),
            _ => None,
        }
    }
}

/// Winner sizes along K for one (dataset, criterion, I, seed, repeat) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCheck {
    pub dataset: String,
    pub criterion: Criterion,
    pub iterations: u64,
    pub seed: u64,
    pub repeat: usize,
    /// `(K, winner size)` in ascending K.
    pub sizes: Vec<(usize, usize)>,
    pub monotone: bool,
}

/// Pipeline seconds along I for one (dataset, criterion, K, seed, repeat) group,
/// with a least-squares line through the points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub dataset: String,
    pub criterion: Criterion,
    pub top_k: TopK,
    pub seed: u64,
    pub repeat: usize,
    /// `(I, Phase 1 + Phase 2 seconds)` in ascending I.
    pub points: Vec<(u64, f64)>,
    pub seconds_per_1000_iterations: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchOutcome {
    pub cells: Vec<BenchCell>,
    pub monotonicity: Vec<MonotoneCheck>,
    pub scaling: Vec<ScalingCheck>,
    /// Cells ran concurrently, so their timings are not comparable.
    pub parallel: bool,
}

impl BenchOutcome {
    pub fn reports(&self) -> impl Iterator<Item = &RunReport> {
        self.cells.iter().filter_map(BenchCell::report)
    }

    pub fn monotone(&self) -> bool {
        self.monotonicity.iter().all(|m| m.monotone)
    }

    /// Worst failure among cells, if any.
    pub fn exit_code(&self) -> u8 {
        self.cells
            .iter()
            .filter_map(|c| match c.status {
                CellStatus::Failed { exit_code, .. } => Some(exit_code),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20} {:<9} {:>6} {:>6} {:>8} {:>4} {:>9} {:>8} {:>10}  status",
            "dataset", "criterion", "I", "K", "seed", "rep", "lcc |V|", "winner", "seconds"
        );
        for c in &self.cells {
            let (k, lcc, winner, secs, status) = match &c.status {
                CellStatus::Ran { report } => (
                    report.params.top_k_resolved.to_string(),
                    report.lcc_stats.vertices.to_string(),
                    report.winner_size.to_string(),
                    report.timing.map_or("-".into(), |t| format!("{:.3}", t.total())),
                    "ok".to_string(),
                ),
                CellStatus::Skipped { reason } => {
                    (c.top_k.to_string(), "-".into(), "-".into(), "-".into(), format!("skipped: {reason}"))
                }
                CellStatus::Failed { error, .. } => {
                    (c.top_k.to_string(), "-".into(), "-".into(), "-".into(), format!("FAILED: {error}"))
                }
            };
            let _ = writeln!(
                out,
                "{:<20} {:<9} {:>6} {:>6} {:>8} {:>4} {:>9} {:>8} {:>10}  {}",
                c.dataset, c.criterion, c.iterations, k, c.seed, c.repeat, lcc, winner, secs, status
            );
        }
        for m in &self.monotonicity {
            let sizes: Vec<String> = m.sizes.iter().map(|(k, s)| format!("K={k}:{s}")).collect();
            let _ = writeln!(
                out,
                "K-monotonicity {} {} I={} seed={} rep={}: {} [{}]",
                m.dataset,
                m.criterion,
                m.iterations,
                m.seed,
                m.repeat,
                if m.monotone { "ok" } else { "VIOLATED" },
                sizes.join(" ")
            );
        }
        for sc in &self.scaling {
            let points: Vec<String> = sc.points.iter().map(|(i, t)| format!("I={i}:{t:.3}s")).collect();
            let _ = writeln!(
                out,
                "I-scaling {} {} K={} seed={} rep={}: {:.4}s per 1000 iterations, r^2={:.3} [{}]",
                sc.dataset,
                sc.criterion,
                sc.top_k,
                sc.seed,
                sc.repeat,
                sc.seconds_per_1000_iterations,
                sc.r_squared,
                points.join(" ")
            );
        }
        if self.parallel {
            out.push_str("note: cells ran in parallel; timings are not comparable\n");
        }
        out
    }
}

/// (dataset, criterion, swept-over parameter held fixed, seed, repeat)
type GroupKey<P> = (String, &'static str, P, u64, usize);

fn monotonicity(cells: &[BenchCell]) -> Vec<MonotoneCheck> {
    let mut groups: BTreeMap<GroupKey<u64>, Vec<(usize, usize)>> = BTreeMap::new();
    for c in cells {
        if let Some(r) = c.report() {
            groups
                .entry((c.dataset.clone(), c.criterion.name(), c.iterations, c.seed, c.repeat))
                .or_default()
                .push((r.params.top_k_resolved, r.winner_size));
        }
    }
    groups
        .into_iter()
        .filter_map(|((dataset, criterion, iterations, seed, repeat), mut sizes)| {
            sizes.sort_unstable();
            sizes.dedup();
            if sizes.len() < 2 {
                return None;
            }
            let monotone = sizes.windows(2).all(|w| w[0].1 <= w[1].1);
            Some(MonotoneCheck {
                dataset,
                criterion: criterion.parse().expect("criterion name round-trips"),
                iterations,
                seed,
                repeat,
                sizes,
                monotone,
            })
        })
        .collect()
}

fn fit(points: &[(u64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

/// `(I, seconds)`
type TimedPoint = (u64, f64);

fn scaling(cells: &[BenchCell]) -> Vec<ScalingCheck> {
    let mut groups: BTreeMap<GroupKey<String>, (TopK, Vec<TimedPoint>)> = BTreeMap::new();
    for c in cells {
        if let Some(t) = c.report().and_then(|r| r.timing) {
            groups
                .entry((c.dataset.clone(), c.criterion.name(), c.top_k.to_string(), c.seed, c.repeat))
                .or_insert_with(|| (c.top_k, Vec::new()))
                .1
                .push((c.iterations, t.phase1 + t.phase2));
        }
    }
    groups
        .into_iter()
        .filter_map(|((dataset, criterion, _, seed, repeat), (top_k, mut points))| {
            points.sort_by_key(|p| p.0);
            points.dedup_by_key(|p| p.0);
            if points.len() < 2 {
                return None;
            }
            let (slope, r_squared) = fit(&points);
            Some(ScalingCheck {
                dataset,
                criterion: criterion.parse().expect("criterion name round-trips"),
                top_k,
                seed,
                repeat,
                points,
                seconds_per_1000_iterations: 1000.0 * slope,
                r_squared,
            })
        })
        .collect()
}

struct Job<'a> {
    graph: &'a SignedGraph,
    ingest_seconds: f64,
    cell: BenchCell,
    opts: RunOptions,
}

fn run_job(job: Job<'_>) -> BenchCell {
    let mut cell = job.cell;
    cell.status = match run_graph(job.graph, cell.dataset.clone(), &job.opts, job.ingest_seconds) {
        Ok(report) => CellStatus::Ran { report: Box::new(report) },
        Err(e) => CellStatus::Failed { exit_code: e.exit_code(), error: e.to_string() },
    };
    cell
}

pub fn run_bench(manifest: &Manifest, opts: &BenchOptions) -> BenchOutcome {
    let repeats = opts.repeats.or(manifest.repeats).unwrap_or(1).max(1);
    let mut loaded = Vec::new();
    for d in &manifest.datasets {
        let t = Instant::now();
        let graph = load_graph(&d.path, d.format);
        loaded.push((graph, t.elapsed().as_secs_f64()));
    }

    let mut cells = Vec::new();
    let mut jobs = Vec::new();
    for (d, (graph, ingest_seconds)) in manifest.datasets.iter().zip(&loaded) {
        let sweep = d.sweep.or(&manifest.defaults);
        let criteria = sweep.criteria.unwrap_or_else(|| vec![Criterion::Harary]);
        let iterations = sweep.iterations.unwrap_or_else(|| vec![opts.profile.iterations()]);
        let top_ks = sweep.top_k.unwrap_or_else(|| vec![TopK::Auto]);
        let seeds = sweep.seeds.unwrap_or_else(|| vec![0]);
        for &criterion in &criteria {
            for &i in &iterations {
                for &top_k in &top_ks {
                    for &seed in &seeds {
                        for repeat in 0..repeats {
                            let cell = BenchCell {
                                dataset: d.name.clone(),
                                criterion,
                                iterations: i,
                                top_k,
                                seed: seed.wrapping_add(repeat as u64),
                                repeat,
                                status: CellStatus::Skipped { reason: String::new() },
                            };
                            match graph {
                                Err(e) => cells
                                    .push(BenchCell { status: CellStatus::Skipped { reason: e.to_string() }, ..cell }),
                                Ok(g) => {
                                    let run = RunOptions {
                                        criterion,
                                        iterations: Some(i),
                                        top_k,
                                        seed: cell.seed,
                                        profile: opts.profile,
                                        timing: opts.timing,
                                    };
                                    cells.push(cell.clone());
                                    jobs.push((
                                        cells.len() - 1,
                                        Job { graph: g, ingest_seconds: *ingest_seconds, cell, opts: run },
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let finished: Vec<(usize, BenchCell)> = if opts.parallel {
        jobs.into_par_iter().map(|(slot, job)| (slot, run_job(job))).collect()
    } else {
        jobs.into_iter().map(|(slot, job)| (slot, run_job(job))).collect()
    };
    for (slot, cell) in finished {
        cells[slot] = cell;
    }
    let monotonicity = monotonicity(&cells);
    let scaling = if opts.parallel { Vec::new() } else { scaling(&cells) };
    BenchOutcome { cells, monotonicity, scaling, parallel: opts.parallel }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_is_empty_table() {
        let m = Manifest::parse("").unwrap();
        let out = run_bench(&m, &BenchOptions::default());
        assert!(out.cells.is_empty());
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.table().lines().count(), 1);
    }

    #[test]
    fn manifest_parses_sweeps() {
        let m = Manifest::parse(
            r#"
repeats = 2
[defaults]
criteria = ["harary", "degree"]
top_k = ["auto", 5]

[[dataset]]
name = "toy"
path = "toy.tsv"
format = "konect"
seeds = [3]
"#,
        )
        .unwrap();
        assert_eq!(m.repeats, Some(2));
        assert_eq!(m.defaults.top_k, Some(vec![TopK::Auto, TopK::Fixed(5)]));
        assert_eq!(m.datasets[0].sweep.seeds, Some(vec![3]));
        assert_eq!(m.datasets[0].format, SourceFormat::Konect);
        assert!(Manifest::parse("bogus = 1").is_err());
    }

    #[test]
    fn line_fit() {
        let (slope, r2) = fit(&[(100, 1.0), (200, 2.0), (400, 4.0)]);
        assert!((slope - 0.01).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_dataset_is_skipped() {
        let m = Manifest::parse(
            r#"
[[dataset]]
name = "ghost"
path = "/nonexistent/ghost.tsv"
format = "konect"
top_k = [1, 2]
"#,
        )
        .unwrap();
        let out = run_bench(&m, &BenchOptions::default());
        assert_eq!(out.cells.len(), 2);
        assert!(out.cells.iter().all(|c| matches!(c.status, CellStatus::Skipped { .. })));
        assert_eq!(out.exit_code(), 0);
        assert!(out.monotonicity.is_empty());
    }
}
