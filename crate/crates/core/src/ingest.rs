//! Edge-list readers for the benchmark formats and a planted-partition generator.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{canonicalize, SignedGraph};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Konect,
    Amazon,
    Canonical,
    Planted,
}

impl std::str::FromStr for SourceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "konect" => Ok(SourceFormat::Konect),
            "amazon" => Ok(SourceFormat::Amazon),
            "canonical" => Ok(SourceFormat::Canonical),
            other => Err(format!("unknown format `{other}` (expected konect, amazon or canonical)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawEdgeList {
    pub records: Vec<RawRecord>,
    pub format: SourceFormat,
    /// Records dropped because their value was out of range (Amazon ratings).
    pub rejected: usize,
}

impl RawEdgeList {
    pub fn new(format: SourceFormat) -> Self {
        Self { records: Vec::new(), format, rejected: 0 }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn push(&mut self, source: impl Into<String>, target: impl Into<String>, weight: f64) {
        self.records.push(RawRecord { source: source.into(), target: target.into(), weight });
    }

    pub fn to_graph(&self) -> SignedGraph {
        canonicalize(self.records.iter().map(|r| (r.source.as_str(), r.target.as_str(), r.weight)))
    }
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path).map(BufReader::new).map_err(|source| IngestError::Io { path: path.to_owned(), source })
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty())
}

fn parse_weight(token: &str, line: usize) -> Result<f64, IngestError> {
    match token.parse::<f64>() {
        Ok(w) if w.is_finite() => Ok(w),
        _ => Err(IngestError::Parse { line, message: format!("weight `{token}` is not a finite number") }),
    }
}

fn read_lines<R: BufRead>(
    reader: R,
    mut each: impl FnMut(usize, &str) -> Result<(), IngestError>,
) -> Result<(), IngestError> {
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| IngestError::Parse { line: i + 1, message: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        each(i + 1, trimmed)?;
    }
    Ok(())
}

/// Reads `u v [weight ...]` lines separated by whitespace or commas. Columns after
/// the weight (Konect timestamps) are ignored; a missing weight means `+1`.
pub fn parse_konect<R: BufRead>(reader: R) -> Result<RawEdgeList, IngestError> {
    let mut out = RawEdgeList::new(SourceFormat::Konect);
    read_lines(reader, |line, text| {
        let mut it = fields(text);
        let (Some(u), Some(v)) = (it.next(), it.next()) else {
            return Err(IngestError::Parse { line, message: "expected at least two columns".into() });
        };
        let weight = it.next().map(|w| parse_weight(w, line)).transpose()?.unwrap_or(1.0);
        out.push(u, v, weight);
        Ok(())
    })?;
    Ok(out)
}

pub fn load_konect(path: impl AsRef<Path>) -> Result<RawEdgeList, IngestError> {
    parse_konect(open(path.as_ref())?)
}

/// Maps an Amazon star rating to an edge weight; `None` outside `[1, 5]`.
/// Ratings 4-5 are positive, the neutral 3 counts as positive and 1-2 are negative.
pub fn amazon_rating_weight(rating: f64) -> Option<f64> {
    if !(1.0..=5.0).contains(&rating) {
        return None;
    }
    Some(if rating >= 3.0 { 1.0 } else { -1.0 })
}

/// Reads `user,item,rating[,timestamp]`. Users and items live in separate label
/// namespaces (`u:` and `i:` prefixes) so equal raw ids never merge.
pub fn parse_amazon_ratings<R: BufRead>(reader: R) -> Result<RawEdgeList, IngestError> {
    let mut out = RawEdgeList::new(SourceFormat::Amazon);
    read_lines(reader, |line, text| {
        let cols: Vec<&str> = text.split(',').map(str::trim).collect();
        if cols.len() < 3 || cols[0].is_empty() || cols[1].is_empty() {
            return Err(IngestError::Parse { line, message: "expected user,item,rating".into() });
        }
        let rating = parse_weight(cols[2], line)?;
        match amazon_rating_weight(rating) {
            Some(w) => out.push(format!("u:{}", cols[0]), format!("i:{}", cols[1]), w),
            None => out.rejected += 1,
        }
        Ok(())
    })?;
    Ok(out)
}

pub fn load_amazon_ratings(path: impl AsRef<Path>) -> Result<RawEdgeList, IngestError> {
    parse_amazon_ratings(open(path.as_ref())?)
}

/// The repository's own edge-list format: `u v sign` with the sign exactly `1`
/// or `-1`.
pub fn parse_canonical<R: BufRead>(reader: R) -> Result<RawEdgeList, IngestError> {
    let mut list = RawEdgeList::new(SourceFormat::Canonical);
    read_lines(reader, |line, text| {
        let cols: Vec<&str> = fields(text).collect();
        if cols.len() != 3 {
            return Err(IngestError::Parse { line, message: "expected `u v sign`".into() });
        }
        let weight = match cols[2] {
            "1" | "+1" => 1.0,
            "-1" => -1.0,
            other => return Err(IngestError::Parse { line, message: format!("sign `{other}` is not 1 or -1") }),
        };
        list.push(cols[0], cols[1], weight);
        Ok(())
    })?;
    Ok(list)
}

pub fn load_canonical(path: impl AsRef<Path>) -> Result<RawEdgeList, IngestError> {
    parse_canonical(open(path.as_ref())?)
}

pub fn load(path: impl AsRef<Path>, format: SourceFormat) -> Result<RawEdgeList, IngestError> {
    match format {
        SourceFormat::Konect => load_konect(path),
        SourceFormat::Amazon => load_amazon_ratings(path),
        SourceFormat::Canonical | SourceFormat::Planted => load_canonical(path),
    }
}

/// Writes `label label sign` lines, one per edge, in edge-id order.
pub fn write_canonical<W: Write>(g: &SignedGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "% signed edge list: {} vertices, {} edges", g.vertex_count(), g.edge_count())?;
    for e in g.edges() {
        writeln!(out, "{} {} {}", g.label(e.u), g.label(e.v), e.sign)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedParams {
    pub n_core: usize,
    pub n_noise: usize,
    pub p_core: f64,
    pub p_noise: f64,
    pub neg_noise_fraction: f64,
}

/// Visits each `i < row` with probability `p`, skipping geometrically so the cost
/// is proportional to the number of hits.
fn sample_row(rng: &mut ChaCha8Rng, row: usize, p: f64, mut hit: impl FnMut(&mut ChaCha8Rng, usize)) {
    if p <= 0.0 || row == 0 {
        return;
    }
    if p >= 1.0 {
        for i in 0..row {
            hit(rng, i);
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut i = 0usize;
    loop {
        let u: f64 = rng.gen::<f64>();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (row - i) as f64 {
            return;
        }
        i += skip as usize;
        hit(rng, i);
        i += 1;
        if i >= row {
            return;
        }
    }
}

/// A balanced core wired into random noise.
///
/// Core vertices `c0..` get a random two-sided split; core pairs are joined with
/// probability `p_core`, positive on the same side and negative across. Every
/// pair involving a noise vertex `n0..` is joined with probability `p_noise` and
/// is negative with probability `neg_noise_fraction`.
pub fn generate_planted(params: &PlantedParams, seed: u64) -> Result<RawEdgeList, IngestError> {
    let PlantedParams { n_core, n_noise, p_core, p_noise, neg_noise_fraction } = *params;
    if n_core < 1 {
        return Err(IngestError::InvalidParameter("n_core must be at least 1".into()));
    }
    for (name, p) in [("p_core", p_core), ("p_noise", p_noise), ("neg_noise_fraction", neg_noise_fraction)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(IngestError::InvalidParameter(format!("{name} = {p} is not in [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side: Vec<bool> = (0..n_core).map(|_| rng.gen()).collect();
    let label = |i: usize| if i < n_core { format!("c{i}") } else { format!("n{}", i - n_core) };

    let mut out = RawEdgeList::new(SourceFormat::Planted);
    let mut hits = Vec::new();
    for j in 1..n_core {
        hits.clear();
        sample_row(&mut rng, j, p_core, |_, i| hits.push(i));
        for &i in &hits {
            let w = if side[i] == side[j] { 1.0 } else { -1.0 };
            out.push(label(i), label(j), w);
        }
    }
    for j in n_core..n_core + n_noise {
        hits.clear();
        let mut signed = Vec::new();
        sample_row(&mut rng, j, p_noise, |rng, i| {
            let w = if rng.gen::<f64>() < neg_noise_fraction { -1.0 } else { 1.0 };
            signed.push((i, w));
        });
        for (i, w) in signed {
            out.push(label(i), label(j), w);
        }
    }
    Ok(out)
}

/// True for labels emitted for core vertices by [`generate_planted`].
pub fn is_core_label(label: &str) -> bool {
    label.starts_with('c')
}
