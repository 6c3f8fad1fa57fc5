//! Ground-truth checks: balance testing by sign-aware 2-coloring, plus exhaustive
//! oracles for graphs small enough to enumerate.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, Sign, SignedGraph, VertexId};
use crate::purge::AbcdResult;

/// Vertex limit for [`frustration_index`].
pub const FRUSTRATION_ORACLE_LIMIT: usize = 20;
/// Vertex limit for [`oracle_max_balanced`].
pub const SUBGRAPH_ORACLE_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle scale exceeded: {vertices} vertices, limit {limit}")]
    ScaleExceeded { vertices: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} listed twice")]
    DuplicateVertex(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BalanceReport {
    /// `side[v]` is true for one class of a valid bipartition: an edge is negative
    /// exactly when its endpoints fall on different sides.
    Balanced { side: Vec<bool> },
    /// An edge closing a negative cycle.
    Unbalanced { edge: EdgeId },
}

impl BalanceReport {
    pub fn is_balanced(&self) -> bool {
        matches!(self, BalanceReport::Balanced { .. })
    }

    pub fn violating_edge(&self) -> Option<EdgeId> {
        match self {
            BalanceReport::Unbalanced { edge } => Some(*edge),
            BalanceReport::Balanced { .. } => None,
        }
    }
}

/// Colors every component from its smallest vertex; positive edges keep the
/// color and negative edges swap it.
pub fn is_balanced(g: &SignedGraph) -> BalanceReport {
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
                let want = cx ^ g.edge(e).sign.is_negative();
                match color[y as usize] {
                    None => {
                        color[y as usize] = Some(want);
                        queue.push_back(y);
                    }
                    Some(c) if c != want => return BalanceReport::Unbalanced { edge: e },
                    Some(_) => {}
                }
            }
        }
    }
    BalanceReport::Balanced { side: color.into_iter().map(|c| c.unwrap_or(false)).collect() }
}

/// Whether switching the signs of `edges` balances `g`.
pub fn switch_set_balances(g: &SignedGraph, edges: &[EdgeId]) -> Result<bool, GraphError> {
    Ok(is_balanced(&g.with_switched(edges)?).is_balanced())
}

/// Exact frustration index: the minimum over all bipartitions of positive edges
/// crossing plus negative edges inside. Walks the bipartitions in Gray-code order
/// so each step only touches one vertex's edges.
pub fn frustration_index(g: &SignedGraph) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    if n > FRUSTRATION_ORACLE_LIMIT {
        return Err(OracleError::ScaleExceeded { vertices: n, limit: FRUSTRATION_ORACLE_LIMIT });
    }
    if n <= 1 {
        return Ok(0);
    }
    let mut side = vec![false; n];
    let frustrated =
        |e: &crate::graph::Edge, side: &[bool]| (side[e.u as usize] != side[e.v as usize]) != e.sign.is_negative();
    let mut cost = g.negative_edge_count() as i64;
    let mut best = cost;
    // vertex 0 stays on side `false`; Gray code over the other n-1 vertices
    for step in 1u64..(1u64 << (n - 1)) {
        let v = step.trailing_zeros() as usize + 1;
        for &(_, e) in g.incident(v as VertexId) {
            if frustrated(g.edge(e), &side) {
                cost -= 1;
            } else {
                cost += 1;
            }
        }
        side[v] = !side[v];
        best = best.min(cost);
    }
    Ok(best as usize)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    pub size: usize,
    /// Sorted vertex ids of the witness sub-graph.
    pub vertices: Vec<VertexId>,
}

struct MaskGraph {
    positive: Vec<u32>,
    negative: Vec<u32>,
}

impl MaskGraph {
    fn new(g: &SignedGraph) -> Self {
        let n = g.vertex_count();
        let mut positive = vec![0u32; n];
        let mut negative = vec![0u32; n];
        for e in g.edges() {
            let target = if e.sign == Sign::Positive { &mut positive } else { &mut negative };
            target[e.u as usize] |= 1 << e.v;
            target[e.v as usize] |= 1 << e.u;
        }
        Self { positive, negative }
    }

    /// (balanced, connected) for the sub-graph induced by `subset`.
    fn check(&self, subset: u32) -> (bool, bool) {
        let mut seen = 0u32;
        let mut odd = 0u32;
        let mut components = 0;
        let mut stack = Vec::with_capacity(16);
        while seen != subset {
            let start = (subset & !seen).trailing_zeros();
            seen |= 1 << start;
            components += 1;
            stack.push(start);
            while let Some(x) = stack.pop() {
                let x_odd = odd >> x & 1 == 1;
                let same = self.positive[x as usize] & subset;
                let diff = self.negative[x as usize] & subset;
                let (want_odd, want_even) = if x_odd { (same, diff) } else { (diff, same) };
                if (want_odd & seen & !odd) != 0 || (want_even & seen & odd) != 0 {
                    return (false, false);
                }
                let fresh_odd = want_odd & !seen;
                let fresh_even = want_even & !seen;
                if fresh_odd & fresh_even != 0 {
                    return (false, false);
                }
                odd |= fresh_odd;
                seen |= fresh_odd | fresh_even;
                let mut fresh = fresh_odd | fresh_even;
                while fresh != 0 {
                    stack.push(fresh.trailing_zeros());
                    fresh &= fresh - 1;
                }
            }
        }
        (true, components <= 1)
    }
}

/// Largest vertex set whose induced sub-graph is balanced (and connected when
/// `require_connected`). Sizes are tried in descending order and subsets of a
/// size in lexicographic order, so the witness is the lexicographically
/// smallest optimum.
pub fn oracle_max_balanced(g: &SignedGraph, require_connected: bool) -> Result<OracleOutcome, OracleError> {
    let n = g.vertex_count();
    if n > SUBGRAPH_ORACLE_LIMIT {
        return Err(OracleError::ScaleExceeded { vertices: n, limit: SUBGRAPH_ORACLE_LIMIT });
    }
    let masks = MaskGraph::new(g);
    for size in (1..=n).rev() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let subset = idx.iter().fold(0u32, |m, &i| m | 1 << i);
            let (balanced, connected) = masks.check(subset);
            if balanced && (connected || !require_connected) {
                return Ok(OracleOutcome { size, vertices: idx.iter().map(|&i| i as VertexId).collect() });
            }
            // next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < n - size + p) else { break };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    Ok(OracleOutcome { size: 0, vertices: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub balance: BalanceReport,
    pub connected: bool,
    pub vertices: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.balance.is_balanced() && self.connected
    }
}

/// Rebuilds the sub-graph of `g` induced by `vertices` and checks it. A
/// violating edge is reported with ids in `g`.
pub fn verify_vertex_set(g: &SignedGraph, vertices: &[VertexId]) -> Result<VerificationReport, OracleError> {
    let mut seen = vec![false; g.vertex_count()];
    for &v in vertices {
        if v as usize >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange { vertex: v, vertex_count: g.vertex_count() }.into());
        }
        if std::mem::replace(&mut seen[v as usize], true) {
            return Err(OracleError::DuplicateVertex(v));
        }
    }
    let (sub, old_of_new) = g.induced_subgraph(vertices)?;
    let balance = match is_balanced(&sub) {
        BalanceReport::Unbalanced { edge } => {
            let e = sub.edge(edge);
            let original =
                g.find_edge(old_of_new[e.u as usize], old_of_new[e.v as usize]).expect("induced edge exists in parent");
            BalanceReport::Unbalanced { edge: original }
        }
        balanced => balanced,
    };
    Ok(VerificationReport { balance, connected: sub.is_connected(), vertices: vertices.len() })
}

/// Verifies a pipeline result against the graph it was computed on.
pub fn verify_result(g: &SignedGraph, result: &AbcdResult) -> Result<VerificationReport, OracleError> {
    verify_vertex_set(g, &result.winner.vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Negative as N, Positive as P};

    fn triangle() -> SignedGraph {
        SignedGraph::new(3, [(0, 1, P), (1, 2, P), (0, 2, N)]).unwrap()
    }

    fn complete(n: u32, sign: Sign) -> SignedGraph {
        SignedGraph::new(n as usize, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, sign)))).unwrap()
    }

    #[test]
    fn unbalanced_triangle() {
        let r = is_balanced(&triangle());
        assert!(!r.is_balanced());
        assert!(r.violating_edge().is_some());
    }

    #[test]
    fn witness_separates_negative_edges() {
        let g = SignedGraph::new(4, [(0, 1, N), (1, 2, P), (2, 3, N)]).unwrap();
        let BalanceReport::Balanced { side } = is_balanced(&g) else { panic!() };
        for e in g.edges() {
            assert_eq!(side[e.u as usize] != side[e.v as usize], e.sign == N);
        }
    }

    #[test]
    fn disconnected_handled_per_component() {
        let g = SignedGraph::new(6, [(0, 1, N), (3, 4, P), (4, 5, P), (3, 5, N)]).unwrap();
        assert_eq!(is_balanced(&g).violating_edge().map(|e| g.edge(e).u >= 3), Some(true));
    }

    #[test]
    fn switch_sets() {
        let balanced = SignedGraph::new(3, [(0, 1, N), (1, 2, N)]).unwrap();
        assert_eq!(switch_set_balances(&balanced, &[]), Ok(true));
        assert_eq!(switch_set_balances(&triangle(), &[1]), Ok(true));
        assert_eq!(switch_set_balances(&triangle(), &[]), Ok(false));
        assert!(switch_set_balances(&triangle(), &[9]).is_err());
    }

    #[test]
    fn frustration_examples() {
        assert_eq!(frustration_index(&complete(5, P)), Ok(0));
        assert_eq!(frustration_index(&triangle()), Ok(1));
        // all 8 bipartitions of K4 with vertex 0 fixed: sides of size (1,3) leave
        // one negative triangle (3 internal edges), (2,2) leaves 2 internal edges
        assert_eq!(frustration_index(&complete(4, N)), Ok(2));
        assert_eq!(frustration_index(&SignedGraph::empty()), Ok(0));
    }

    #[test]
    fn frustration_scale_limit() {
        let g = SignedGraph::new(21, [(0, 1, P)]).unwrap();
        assert_eq!(
            frustration_index(&g),
            Err(OracleError::ScaleExceeded { vertices: 21, limit: FRUSTRATION_ORACLE_LIMIT })
        );
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_max_balanced(&complete(5, P), true).unwrap().size, 5);
        let t = oracle_max_balanced(&triangle(), true).unwrap();
        assert_eq!(t, OracleOutcome { size: 2, vertices: vec![0, 1] });
        assert_eq!(oracle_max_balanced(&complete(4, N), true).unwrap().size, 2);
        assert_eq!(oracle_max_balanced(&SignedGraph::empty(), true).unwrap().size, 0);
        assert!(oracle_max_balanced(&SignedGraph::new(17, []).unwrap(), false).is_err());
    }

    #[test]
    fn oracle_connected_mode_differs() {
        // negative triangle plus two isolated vertices
        let g = SignedGraph::new(5, [(0, 1, N), (1, 2, N), (0, 2, N)]).unwrap();
        assert_eq!(oracle_max_balanced(&g, false).unwrap().size, 4);
        assert_eq!(oracle_max_balanced(&g, true).unwrap().size, 2);
    }

    #[test]
    fn verify_vertex_sets() {
        let g = triangle();
        let ok = verify_vertex_set(&g, &[0, 1]).unwrap();
        assert!(ok.passed());
        let bad = verify_vertex_set(&g, &[0, 1, 2]).unwrap();
        assert!(!bad.passed());
        assert!(bad.balance.violating_edge().is_some());
        let split = verify_vertex_set(&SignedGraph::new(3, [(0, 1, P)]).unwrap(), &[0, 2]).unwrap();
        assert!(split.balance.is_balanced() && !split.connected);
        assert!(verify_vertex_set(&g, &[3]).is_err());
        assert_eq!(verify_vertex_set(&g, &[1, 1]), Err(OracleError::DuplicateVertex(1)));
    }
}
