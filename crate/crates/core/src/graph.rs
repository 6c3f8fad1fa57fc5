//! Undirected signed graph in compressed incidence form.
//!
//! Edge ids follow the sorted `(u, v)` order of the canonical edge list, so two
//! graphs with the same edge set always agree on ids.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::DisjointSet;

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    /// Zero counts as positive: unsigned relations are amity.
    pub fn from_weight(w: f64) -> Sign {
        if w >= 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub sign: Sign,
}

impl Edge {
    /// Endpoint across the edge from `x`.
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: VertexId, vertex_count: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(VertexId, VertexId),
    #[error("edge id {edge} out of range for graph with {edge_count} edges")]
    EdgeOutOfRange { edge: EdgeId, edge_count: usize },
    #[error("label count {labels} does not match vertex count {vertex_count}")]
    LabelMismatch { labels: usize, vertex_count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    incidence: Vec<(VertexId, EdgeId)>,
    labels: Option<Vec<String>>,
}

impl SignedGraph {
    /// Builds a graph from edges in any orientation and order. Self-loops and
    /// parallel edges are rejected; use [`canonicalize`] for raw input.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Sign)>,
    ) -> Result<Self, GraphError> {
        let mut list = Vec::new();
        for (a, b, sign) in edges {
            for x in [a, b] {
                if x as usize >= vertex_count {
                    return Err(GraphError::VertexOutOfRange { vertex: x, vertex_count });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            list.push(Edge { u: a.min(b), v: a.max(b), sign });
        }
        list.sort_unstable_by_key(|e| (e.u, e.v));
        if let Some(w) = list.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(GraphError::ParallelEdge(w[0].u, w[0].v));
        }
        Ok(Self::from_sorted(vertex_count, list, None))
    }

    fn from_sorted(vertex_count: usize, edges: Vec<Edge>, labels: Option<Vec<String>>) -> Self {
        let mut offsets = vec![0usize; vertex_count + 1];
        for e in &edges {
            offsets[e.u as usize + 1] += 1;
            offsets[e.v as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut incidence = vec![(0, 0); 2 * edges.len()];
        for (id, e) in edges.iter().enumerate() {
            incidence[fill[e.u as usize]] = (e.v, id as EdgeId);
            fill[e.u as usize] += 1;
            incidence[fill[e.v as usize]] = (e.u, id as EdgeId);
            fill[e.v as usize] += 1;
        }
        Self { vertex_count, edges, offsets, incidence, labels }
    }

    pub fn empty() -> Self {
        Self::from_sorted(0, Vec::new(), None)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.vertex_count {
            return Err(GraphError::LabelMismatch { labels: labels.len(), vertex_count: self.vertex_count });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count == 0
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn checked_edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(id as usize).ok_or(GraphError::EdgeOutOfRange { edge: id, edge_count: self.edges.len() })
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn incident(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.incidence[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External label of `v`, or its dense id when the graph carries no labels.
    pub fn label(&self, v: VertexId) -> String {
        match &self.labels {
            Some(labels) => labels[v as usize].clone(),
            None => v.to_string(),
        }
    }

    pub fn vertex_by_label(&self) -> HashMap<String, VertexId> {
        (0..self.vertex_count as VertexId).map(|v| (self.label(v), v)).collect()
    }

    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let (u, v) = (a.min(b), a.max(b));
        self.edges.binary_search_by(|e| (e.u, e.v).cmp(&(u, v))).ok().map(|i| i as EdgeId)
    }

    pub fn negative_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.sign.is_negative()).count()
    }

    /// Copy of the graph with the signs of `edge_ids` switched.
    pub fn with_switched(&self, edge_ids: &[EdgeId]) -> Result<SignedGraph, GraphError> {
        let mut edges = self.edges.clone();
        for &id in edge_ids {
            self.checked_edge(id)?;
            let e = &mut edges[id as usize];
            e.sign = e.sign.flipped();
        }
        Ok(Self::from_sorted(self.vertex_count, edges, self.labels.clone()))
    }

    /// Sub-graph induced by `keep` (any order, duplicates ignored). New ids follow
    /// ascending old ids; the returned vector maps new id to old id.
    pub fn induced_subgraph(&self, keep: &[VertexId]) -> Result<(SignedGraph, Vec<VertexId>), GraphError> {
        let mut new_id = vec![u32::MAX; self.vertex_count];
        for &v in keep {
            if v as usize >= self.vertex_count {
                return Err(GraphError::VertexOutOfRange { vertex: v, vertex_count: self.vertex_count });
            }
            new_id[v as usize] = 0;
        }
        let mut old_of_new = Vec::with_capacity(keep.len());
        for (v, id) in new_id.iter_mut().enumerate() {
            if *id == 0 {
                *id = old_of_new.len() as u32;
                old_of_new.push(v as VertexId);
            }
        }
        Ok((self.remap(&new_id, &old_of_new), old_of_new))
    }

    // `new_id[v] == u32::MAX` marks a dropped vertex. Preserves edge order, which
    // stays sorted because the relabeling is monotone.
    fn remap(&self, new_id: &[u32], old_of_new: &[VertexId]) -> SignedGraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| new_id[e.u as usize] != u32::MAX && new_id[e.v as usize] != u32::MAX)
            .map(|e| Edge { u: new_id[e.u as usize], v: new_id[e.v as usize], sign: e.sign })
            .collect();
        let labels = self.labels.as_ref().map(|l| old_of_new.iter().map(|&v| l[v as usize].clone()).collect());
        Self::from_sorted(old_of_new.len(), edges, labels)
    }

    pub fn connected_components(&self) -> Components {
        let n = self.vertex_count;
        let mut component_of = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component_of[start] != u32::MAX {
                continue;
            }
            let c = sizes.len() as u32;
            component_of[start] = c;
            queue.push_back(start as VertexId);
            let mut size = 0;
            while let Some(x) = queue.pop_front() {
                size += 1;
                for &(y, _) in self.incident(x) {
                    if component_of[y as usize] == u32::MAX {
                        component_of[y as usize] = c;
                        queue.push_back(y);
                    }
                }
            }
            sizes.push(size);
        }
        Components { component_of, sizes }
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().sizes.len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Largest connected component, ties going to the component holding the
    /// smallest vertex id. The mapping sends old ids to new ids.
    pub fn largest_connected_component(&self) -> (SignedGraph, Vec<Option<VertexId>>) {
        let comps = self.connected_components();
        let Some(best) = comps.largest() else {
            return (SignedGraph::empty().with_labels_like(self), Vec::new());
        };
        let mut new_id = vec![u32::MAX; self.vertex_count];
        let mut old_of_new = Vec::with_capacity(comps.sizes[best as usize]);
        for (v, id) in new_id.iter_mut().enumerate() {
            if comps.component_of[v] == best {
                *id = old_of_new.len() as u32;
                old_of_new.push(v as VertexId);
            }
        }
        let g = self.remap(&new_id, &old_of_new);
        let mapping = new_id.into_iter().map(|x| (x != u32::MAX).then_some(x)).collect();
        (g, mapping)
    }

    fn with_labels_like(mut self, other: &SignedGraph) -> SignedGraph {
        if other.labels.is_some() {
            self.labels = Some(Vec::new());
        }
        self
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.vertex_count as VertexId).map(|v| self.degree(v) as u32).collect()
    }

    /// Sum of neighbor degrees, iterated: each round replaces the degree array
    /// with the previous round's sums. `rounds` must be at least 1.
    pub fn neighborhood_degree_sums(&self, rounds: usize) -> Vec<u64> {
        assert!(rounds >= 1, "neighborhood_degree_sums needs at least one round");
        let mut current: Vec<u64> = self.degrees().into_iter().map(u64::from).collect();
        for _ in 0..rounds {
            current = (0..self.vertex_count as VertexId)
                .map(|v| self.incident(v).iter().fold(0u64, |acc, &(w, _)| acc.saturating_add(current[w as usize])))
                .collect();
        }
        current
    }

    /// Number of independent cycles: |E| - |V| + (number of components).
    pub fn cycle_space_dimension(&self) -> usize {
        let mut ds = DisjointSet::new(self.vertex_count);
        let mut forest_edges = 0;
        for e in &self.edges {
            if ds.union(e.u, e.v) {
                forest_edges += 1;
            }
        }
        self.edges.len() - forest_edges
    }

    pub fn stats(&self) -> GraphStats {
        let n = self.vertex_count;
        let m = self.edges.len();
        let mut degrees = self.degrees();
        degrees.sort_unstable();
        let degree_median = match n {
            0 => 0.0,
            _ if n % 2 == 1 => degrees[n / 2] as f64,
            _ => (degrees[n / 2 - 1] as f64 + degrees[n / 2] as f64) / 2.0,
        };
        GraphStats {
            vertices: n,
            edges: m,
            components: self.component_count(),
            cycle_space_dimension: self.cycle_space_dimension(),
            density: if n < 2 { 0.0 } else { 2.0 * m as f64 / (n as f64 * (n as f64 - 1.0)) },
            negative_fraction: if m == 0 { 0.0 } else { self.negative_edge_count() as f64 / m as f64 },
            degree_avg: if n == 0 { 0.0 } else { 2.0 * m as f64 / n as f64 },
            degree_median,
            degree_max: degrees.last().copied().unwrap_or(0) as usize,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Components {
    /// Component index per vertex; components are numbered by smallest member.
    pub component_of: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest(&self) -> Option<u32> {
        let mut best: Option<usize> = None;
        for (c, &s) in self.sizes.iter().enumerate() {
            if best.is_none_or(|b| s > self.sizes[b]) {
                best = Some(c);
            }
        }
        best.map(|c| c as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub cycle_space_dimension: usize,
    pub density: f64,
    pub negative_fraction: f64,
    pub degree_avg: f64,
    pub degree_median: f64,
    pub degree_max: usize,
}

/// Orders labels numerically when both parse as integers, textually otherwise;
/// numeric labels sort first.
fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u128>(), b.parse::<u128>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Turns raw `(source, target, weight)` records into a canonical signed graph.
///
/// Direction is dropped, self-loops are discarded (their endpoint still becomes
/// a vertex), repeated pairs are merged by summing weights and the merged sign is
/// positive when the sum is non-negative. Labels get dense ids in ascending
/// label order and are kept on the graph.
pub fn canonicalize<'a, I>(records: I) -> SignedGraph
where
    I: IntoIterator<Item = (&'a str, &'a str, f64)>,
{
    let records: Vec<(&str, &str, f64)> = records.into_iter().collect();
    let mut labels: Vec<&str> = records.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    labels.sort_unstable_by(|a, b| label_order(a, b));
    labels.dedup();
    let id_of: HashMap<&str, VertexId> = labels.iter().enumerate().map(|(i, &l)| (l, i as VertexId)).collect();

    let mut weight: HashMap<(VertexId, VertexId), f64> = HashMap::new();
    for &(a, b, w) in &records {
        let (x, y) = (id_of[a], id_of[b]);
        if x == y {
            continue;
        }
        *weight.entry((x.min(y), x.max(y))).or_insert(0.0) += w;
    }
    let mut edges: Vec<Edge> =
        weight.into_iter().map(|((u, v), w)| Edge { u, v, sign: Sign::from_weight(w) }).collect();
    edges.sort_unstable_by_key(|e| (e.u, e.v));
    let labels = labels.into_iter().map(str::to_owned).collect::<Vec<_>>();
    SignedGraph::from_sorted(labels.len(), edges, Some(labels))
}
