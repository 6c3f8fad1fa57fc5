//! Phase 1: near-balanced states from sampled BFS spanning trees.
//!
//! Every spanning tree fixes a switching: an off-tree edge is switched when its
//! fundamental cycle is negative. Switching exactly those edges balances the
//! graph, and the number switched is the state's frustration. Only the `K`
//! distinct states with the lowest frustration are retained.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{EdgeId, GraphError, Sign, SignedGraph, VertexId};
use crate::rng::{stream, Purpose};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("graph is disconnected ({components} components); pass its largest connected component")]
    Disconnected { components: usize },
    #[error("edge {0} belongs to the spanning tree")]
    TreeEdge(EdgeId),
    #[error("state not balanced: switching the candidate edges leaves edge {0} in a negative cycle")]
    NotBalanced(EdgeId),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: VertexId,
    /// Parent of each vertex; the root is its own parent.
    pub parent: Vec<VertexId>,
    /// Edge to the parent; `EdgeId::MAX` at the root.
    pub parent_edge: Vec<EdgeId>,
    /// Product of edge signs along the tree path from the root.
    pub path_sign: Vec<Sign>,
    pub tree_edge: Vec<bool>,
}

impl SpanningTree {
    fn with_capacity(n: usize, m: usize) -> Self {
        Self {
            root: 0,
            parent: vec![0; n],
            parent_edge: vec![EdgeId::MAX; n],
            path_sign: vec![Sign::Positive; n],
            tree_edge: vec![false; m],
        }
    }

    pub fn tree_edge_count(&self) -> usize {
        self.tree_edge.iter().filter(|&&t| t).count()
    }
}

/// Reusable buffers for repeated tree sampling on one graph.
struct TreeSampler {
    visited: Vec<bool>,
    queue: VecDeque<VertexId>,
    scratch: Vec<(VertexId, EdgeId)>,
}

impl TreeSampler {
    fn new(n: usize) -> Self {
        Self { visited: vec![false; n], queue: VecDeque::with_capacity(n), scratch: Vec::new() }
    }

    /// BFS from a uniform root, visiting each vertex's neighbors in a fresh
    /// uniform order. Returns the number of vertices reached.
    fn sample<R: Rng>(&mut self, g: &SignedGraph, rng: &mut R, tree: &mut SpanningTree) -> usize {
        let n = g.vertex_count();
        self.visited.iter_mut().for_each(|v| *v = false);
        tree.tree_edge.iter_mut().for_each(|t| *t = false);
        if n == 0 {
            return 0;
        }
        let root = rng.gen_range(0..n) as VertexId;
        tree.root = root;
        tree.parent[root as usize] = root;
        tree.parent_edge[root as usize] = EdgeId::MAX;
        tree.path_sign[root as usize] = Sign::Positive;
        self.visited[root as usize] = true;
        self.queue.clear();
        self.queue.push_back(root);
        let mut reached = 1;
        while let Some(x) = self.queue.pop_front() {
            self.scratch.clear();
            self.scratch.extend_from_slice(g.incident(x));
            self.scratch.shuffle(rng);
            for &(y, e) in &self.scratch {
                if self.visited[y as usize] {
                    continue;
                }
                self.visited[y as usize] = true;
                tree.parent[y as usize] = x;
                tree.parent_edge[y as usize] = e;
                tree.path_sign[y as usize] = tree.path_sign[x as usize] * g.edge(e).sign;
                tree.tree_edge[e as usize] = true;
                self.queue.push_back(y);
                reached += 1;
            }
        }
        reached
    }
}

fn require_connected(g: &SignedGraph) -> Result<(), StateError> {
    let components = g.component_count();
    if components > 1 {
        return Err(StateError::Disconnected { components });
    }
    Ok(())
}

pub fn sample_bfs_spanning_tree<R: Rng>(g: &SignedGraph, rng: &mut R) -> Result<SpanningTree, StateError> {
    let mut tree = SpanningTree::with_capacity(g.vertex_count(), g.edge_count());
    let reached = TreeSampler::new(g.vertex_count()).sample(g, rng, &mut tree);
    if reached < g.vertex_count() {
        return Err(StateError::Disconnected { components: g.component_count() });
    }
    Ok(tree)
}

/// Sign of the cycle closed by off-tree edge `e`. The tree paths from the root to
/// both endpoints share a prefix whose sign cancels, so the product of the two
/// path signs is the sign of the path between the endpoints.
pub fn fundamental_cycle_sign(g: &SignedGraph, tree: &SpanningTree, e: EdgeId) -> Result<Sign, StateError> {
    let edge = g.checked_edge(e)?;
    if tree.tree_edge[e as usize] {
        return Err(StateError::TreeEdge(e));
    }
    Ok(edge.sign * tree.path_sign[edge.u as usize] * tree.path_sign[edge.v as usize])
}

/// Off-tree edges on negative fundamental cycles, ascending. Gives up with
/// `None` as soon as more than `limit` are found.
fn candidates_within(g: &SignedGraph, tree: &SpanningTree, limit: usize) -> Option<Vec<EdgeId>> {
    let mut out = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        if tree.tree_edge[id] {
            continue;
        }
        if (e.sign * tree.path_sign[e.u as usize] * tree.path_sign[e.v as usize]).is_negative() {
            if out.len() == limit {
                return None;
            }
            out.push(id as EdgeId);
        }
    }
    Some(out)
}

pub fn candidate_edge_set(g: &SignedGraph, tree: &SpanningTree) -> Vec<EdgeId> {
    candidates_within(g, tree, usize::MAX).expect("unbounded")
}

/// Harary bipartition of `g` after switching `candidates`: bit `true` marks the
/// larger class `U`; on a tie `U` is the class holding vertex 0.
pub fn harary_vector(g: &SignedGraph, candidates: &[EdgeId]) -> Result<Vec<bool>, StateError> {
    let mut switched = vec![false; g.edge_count()];
    for &e in candidates {
        g.checked_edge(e)?;
        switched[e as usize] = true;
    }
    let n = g.vertex_count();
    let mut color: Vec<Option<bool>> = vec![None; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        queue.push_back(start as VertexId);
        while let Some(x) = queue.pop_front() {
            let cx = color[x as usize].unwrap();
            for &(y, e) in g.incident(x) {
                let negative = g.edge(e).sign.is_negative() != switched[e as usize];
                let want = cx ^ negative;
                match color[y as usize] {
                    None => {
                        color[y as usize] = Some(want);
                        queue.push_back(y);
                    }
                    Some(c) if c != want => return Err(StateError::NotBalanced(e)),
                    Some(_) => {}
                }
            }
        }
    }
    let ones = color.iter().filter(|c| **c == Some(true)).count();
    // vertex 0 has color `false`, so `false` wins ties
    let u_color = ones > n - ones;
    Ok(color.into_iter().map(|c| c == Some(u_color)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedState {
    /// Switched edges, ascending.
    pub candidates: Vec<EdgeId>,
    pub harary: Vec<bool>,
    /// First sampling iteration that produced this candidate set.
    pub iteration: u64,
}

impl BalancedState {
    pub fn frustration(&self) -> usize {
        self.candidates.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    /// Sorted by frustration, then by candidate set.
    pub states: Vec<BalancedState>,
    pub iterations_run: u64,
    pub k_limit: usize,
}

impl StateSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn min_frustration(&self) -> Option<usize> {
        self.states.first().map(BalancedState::frustration)
    }

    pub fn max_frustration(&self) -> Option<usize> {
        self.states.iter().map(BalancedState::frustration).max()
    }
}

/// Bounded buffer of the `k` best distinct candidate sets, keyed by
/// `(frustration, iteration)`. An incoming set displaces the worst entry only if
/// its frustration is strictly lower; equal frustration keeps the earlier one.
/// Selection by key makes merging order-independent.
struct TopK {
    k: usize,
    by_key: BTreeMap<(usize, u64), Arc<[EdgeId]>>,
    first_seen: HashMap<Arc<[EdgeId]>, u64>,
}

impl TopK {
    fn new(k: usize) -> Self {
        Self { k, by_key: BTreeMap::new(), first_seen: HashMap::new() }
    }

    /// Largest frustration that can still be admitted.
    fn admission_limit(&self) -> usize {
        if self.by_key.len() < self.k {
            usize::MAX
        } else {
            self.by_key.last_key_value().map_or(usize::MAX, |(&(f, _), _)| f)
        }
    }

    fn would_admit(&self, key: (usize, u64)) -> bool {
        self.by_key.len() < self.k || self.by_key.last_key_value().is_some_and(|(&worst, _)| key < worst)
    }

    fn offer(&mut self, iteration: u64, set: &[EdgeId]) {
        let key = (set.len(), iteration);
        if !self.would_admit(key) {
            return;
        }
        if let Some(&earlier) = self.first_seen.get(set) {
            if earlier <= iteration {
                return;
            }
            let arc = self.by_key.remove(&(set.len(), earlier)).expect("indexed entry");
            self.first_seen.insert(arc.clone(), iteration);
            self.by_key.insert(key, arc);
            return;
        }
        let arc: Arc<[EdgeId]> = Arc::from(set);
        self.first_seen.insert(arc.clone(), iteration);
        self.by_key.insert(key, arc);
        if self.by_key.len() > self.k {
            let (_, evicted) = self.by_key.pop_last().expect("non-empty");
            self.first_seen.remove(&evicted);
        }
    }

    fn merge(mut self, other: TopK) -> TopK {
        for ((_, iteration), set) in other.by_key {
            self.offer(iteration, &set);
        }
        self
    }
}

/// Samples `iterations` BFS trees and keeps the `k` lowest-frustration distinct
/// states with their Harary vectors. Tree `i` draws from the stream
/// `(seed, i)`, so the result does not depend on the thread count.
pub fn collect_topk_states(g: &SignedGraph, iterations: u64, k: usize, seed: u64) -> Result<StateSet, StateError> {
    if iterations == 0 {
        return Err(StateError::InvalidParameters("iterations must be at least 1".into()));
    }
    if k == 0 || k as u64 > iterations {
        return Err(StateError::InvalidParameters(format!("top-k must lie in [1, {iterations}], got {k}")));
    }
    require_connected(g)?;
    let (n, m) = (g.vertex_count(), g.edge_count());
    if n == 0 {
        return Ok(StateSet { states: Vec::new(), iterations_run: iterations, k_limit: k });
    }

    let top = (0..iterations)
        .into_par_iter()
        .fold(
            || (TopK::new(k), TreeSampler::new(n), SpanningTree::with_capacity(n, m)),
            |(mut top, mut sampler, mut tree), i| {
                let mut rng = stream(seed, Purpose::TreeSampling, i);
                sampler.sample(g, &mut rng, &mut tree);
                if let Some(set) = candidates_within(g, &tree, top.admission_limit()) {
                    top.offer(i, &set);
                }
                (top, sampler, tree)
            },
        )
        .map(|(top, _, _)| top)
        .reduce(|| TopK::new(k), TopK::merge);

    let mut states: Vec<BalancedState> = top
        .by_key
        .into_par_iter()
        .map(|((_, iteration), set)| {
            let harary = harary_vector(g, &set)?;
            Ok(BalancedState { candidates: set.to_vec(), harary, iteration })
        })
        .collect::<Result<_, StateError>>()?;
    states.sort_by(|a, b| (a.frustration(), &a.candidates).cmp(&(b.frustration(), &b.candidates)));
    Ok(StateSet { states, iterations_run: iterations, k_limit: k })
}
