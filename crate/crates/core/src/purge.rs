//! Phase 2: for every retained state, delete one endpoint of each switched edge,
//! drop the switched edges, and keep the largest connected component. The
//! biggest such component over all states is the result.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::DisjointSet;
use crate::graph::{EdgeId, SignedGraph, VertexId};
use crate::rng::{stream, Purpose};
use crate::states::{collect_topk_states, BalancedState, StateError, StateSet};

/// Rounds of neighbor-degree summation used by the Harary criterion.
pub const NEIGHBORHOOD_ROUNDS: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PurgeError {
    #[error("inconsistent Harary state: edge {0} contradicts the bipartition")]
    InconsistentHarary(EdgeId),
    #[error("adjusted status needs at least one retained state")]
    EmptyStateSet,
    #[error("status criterion requires adjusted status values")]
    MissingStatus,
    #[error(transparent)]
    States(#[from] StateError),
}

/// Which endpoint of a switched edge gets deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Lower degree goes.
    Degree,
    /// W-side endpoint on switched-positive edges, lower neighborhood sum otherwise.
    Harary,
    /// Lower adjusted status goes.
    Status,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Degree, Criterion::Harary, Criterion::Status];

    /// Numeric code used in the original experiments (1, 2, 3).
    pub fn code(self) -> u8 {
        match self {
            Criterion::Degree => 1,
            Criterion::Harary => 2,
            Criterion::Status => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Degree => "degree",
            Criterion::Harary => "harary",
            Criterion::Status => "status",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "degree" | "1" => Ok(Criterion::Degree),
            "harary" | "2" => Ok(Criterion::Harary),
            "status" | "3" => Ok(Criterion::Status),
            other => Err(format!("unknown criterion `{other}` (expected degree, harary or status)")),
        }
    }
}

/// Per-vertex fraction of retained states that place the vertex in `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedStatus(pub Vec<f64>);

pub fn adjusted_status(states: &StateSet, vertex_count: usize) -> Result<AdjustedStatus, PurgeError> {
    if states.is_empty() {
        return Err(PurgeError::EmptyStateSet);
    }
    let mut sum = vec![0u32; vertex_count];
    for s in &states.states {
        for (acc, &bit) in sum.iter_mut().zip(&s.harary) {
            *acc += u32::from(bit);
        }
    }
    let k = states.len() as f64;
    Ok(AdjustedStatus(sum.into_iter().map(|c| f64::from(c) / k).collect()))
}

/// Per-vertex measures computed once on the whole graph and shared by all states.
#[derive(Debug, Clone)]
pub struct AuxArrays {
    pub degrees: Vec<u32>,
    pub neighborhood: Vec<u64>,
    pub status: Option<AdjustedStatus>,
}

impl AuxArrays {
    pub fn compute(g: &SignedGraph, states: &StateSet) -> Self {
        Self {
            degrees: g.degrees(),
            neighborhood: g.neighborhood_degree_sums(NEIGHBORHOOD_ROUNDS),
            status: adjusted_status(states, g.vertex_count()).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Victim {
    pub vertex: VertexId,
    /// Whether the choice came from a coin flip on a tie.
    pub random: bool,
}

fn coin<R: Rng>(q: VertexId, w: VertexId, rng: &mut R) -> Victim {
    Victim { vertex: if rng.gen_bool(0.5) { q } else { w }, random: true }
}

fn smaller<T: PartialOrd, R: Rng>(q: VertexId, w: VertexId, score_q: T, score_w: T, rng: &mut R) -> Victim {
    if score_q < score_w {
        Victim { vertex: q, random: false }
    } else if score_w < score_q {
        Victim { vertex: w, random: false }
    } else {
        coin(q, w, rng)
    }
}

/// Picks the endpoint of switched edge `e` to delete.
pub fn select_victim<R: Rng>(
    g: &SignedGraph,
    state: &BalancedState,
    e: EdgeId,
    criterion: Criterion,
    aux: &AuxArrays,
    rng: &mut R,
) -> Result<Victim, PurgeError> {
    let edge = g.checked_edge(e).map_err(StateError::from)?;
    let (q, w) = (edge.u, edge.v);
    match criterion {
        Criterion::Degree => {
            // ties go to the higher-id endpoint
            let vertex = if aux.degrees[q as usize] < aux.degrees[w as usize] { q } else { w };
            Ok(Victim { vertex, random: false })
        }
        Criterion::Harary => {
            let (hq, hw) = (state.harary[q as usize], state.harary[w as usize]);
            // a switched edge is negative after switching iff it was positive before
            let negative_after = !edge.sign.is_negative();
            if negative_after == (hq == hw) {
                return Err(PurgeError::InconsistentHarary(e));
            }
            if negative_after {
                Ok(Victim { vertex: if hq { w } else { q }, random: false })
            } else {
                Ok(smaller(q, w, aux.neighborhood[q as usize], aux.neighborhood[w as usize], rng))
            }
        }
        Criterion::Status => {
            let status = aux.status.as_ref().ok_or(PurgeError::MissingStatus)?;
            Ok(smaller(q, w, status.0[q as usize], status.0[w as usize], rng))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionPlan {
    pub state_index: usize,
    /// Deleted vertices in selection order.
    pub removed: Vec<VertexId>,
    pub criterion: Criterion,
    pub random_decisions: usize,
}

/// Walks the state's switched edges in ascending id order, skipping edges that
/// already lost an endpoint.
pub fn build_deletion_plan<R: Rng>(
    g: &SignedGraph,
    state: &BalancedState,
    state_index: usize,
    criterion: Criterion,
    aux: &AuxArrays,
    rng: &mut R,
) -> Result<DeletionPlan, PurgeError> {
    let mut gone = vec![false; g.vertex_count()];
    let mut plan = DeletionPlan { state_index, removed: Vec::new(), criterion, random_decisions: 0 };
    for &e in &state.candidates {
        let edge = g.edge(e);
        if gone[edge.u as usize] || gone[edge.v as usize] {
            continue;
        }
        let victim = select_victim(g, state, e, criterion, aux, rng)?;
        gone[victim.vertex as usize] = true;
        plan.removed.push(victim.vertex);
        plan.random_decisions += usize::from(victim.random);
    }
    Ok(plan)
}

/// Largest connected component left after deleting the plan's vertices and the
/// state's switched edges, as sorted vertex ids of `g`. Ties go to the
/// component with the smallest vertex id.
pub fn apply_plan(g: &SignedGraph, state: &BalancedState, plan: &DeletionPlan) -> Vec<VertexId> {
    let n = g.vertex_count();
    let mut gone = vec![false; n];
    for &v in &plan.removed {
        gone[v as usize] = true;
    }
    let mut switched = vec![false; g.edge_count()];
    for &e in &state.candidates {
        switched[e as usize] = true;
    }
    let mut ds = DisjointSet::new(n);
    for (id, e) in g.edges().iter().enumerate() {
        if !switched[id] && !gone[e.u as usize] && !gone[e.v as usize] {
            ds.union(e.u, e.v);
        }
    }
    let mut best: Option<(usize, u32)> = None;
    for v in 0..n as VertexId {
        if gone[v as usize] {
            continue;
        }
        let size = ds.set_size(v);
        if best.is_none_or(|(s, _)| size > s) {
            best = Some((size, ds.find(v)));
        }
    }
    let Some((_, root)) = best else { return Vec::new() };
    (0..n as VertexId).filter(|&v| !gone[v as usize] && ds.find(v) == root).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// I = 5000, K = 4000 / 100 / 20 by graph size.
    Paper,
    /// I = 1000, K = 700 / 100 / 20 by graph size.
    Fast,
}

impl Profile {
    pub fn iterations(self) -> u64 {
        match self {
            Profile::Paper => 5000,
            Profile::Fast => 1000,
        }
    }

    /// Top-K schedule keyed on the vertex count of the analyzed component.
    pub fn top_k(self, vertices: usize) -> usize {
        match vertices {
            v if v < 100_000 => match self {
                Profile::Paper => 4000,
                Profile::Fast => 700,
            },
            v if v < 300_000 => 100,
            _ => 20,
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Profile::Paper),
            "fast" => Ok(Profile::Fast),
            other => Err(format!("unknown profile `{other}` (expected paper or fast)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopK {
    Auto,
    #[serde(untagged)]
    Fixed(usize),
}

impl FromStr for TopK {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(TopK::Auto);
        }
        s.parse().map(TopK::Fixed).map_err(|_| format!("top-k must be `auto` or a positive integer, got `{s}`"))
    }
}

impl fmt::Display for TopK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopK::Auto => f.write_str("auto"),
            TopK::Fixed(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbcdParams {
    pub iterations: u64,
    pub top_k: TopK,
    pub criterion: Criterion,
    pub seed: u64,
    /// Supplies the top-K schedule when `top_k` is `Auto`.
    pub profile: Profile,
}

impl AbcdParams {
    pub fn new(iterations: u64, top_k: TopK, criterion: Criterion, seed: u64) -> Self {
        Self { iterations, top_k, criterion, seed, profile: Profile::Paper }
    }

    pub fn from_profile(profile: Profile, criterion: Criterion, seed: u64) -> Self {
        Self { iterations: profile.iterations(), top_k: TopK::Auto, criterion, seed, profile }
    }

    /// Concrete K for a component with `vertices` vertices. The automatic
    /// schedule is capped at the iteration count.
    pub fn resolve_top_k(&self, vertices: usize) -> usize {
        match self.top_k {
            TopK::Fixed(k) => k,
            TopK::Auto => (self.profile.top_k(vertices) as u64).min(self.iterations.max(1)) as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub lcc_seconds: f64,
    pub phase1_seconds: f64,
    pub phase2_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Winner {
    /// Sorted vertex ids in the input graph.
    pub vertices: Vec<VertexId>,
    /// The induced sub-graph, carrying the input graph's labels.
    pub graph: SignedGraph,
}

impl Winner {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.graph.vertex_count() as VertexId).map(|v| self.graph.label(v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbcdResult {
    pub winner: Winner,
    pub winner_state_index: Option<usize>,
    /// Largest-component size for each retained state, in state order.
    pub per_state_sizes: Vec<usize>,
    pub iterations: u64,
    pub top_k: usize,
    pub criterion: Criterion,
    pub seed: u64,
    pub lcc_vertices: usize,
    pub lcc_edges: usize,
    pub min_frustration: Option<usize>,
    pub max_frustration: Option<usize>,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PurgeOutcome {
    /// Largest-component size per state, in state order.
    pub sizes: Vec<usize>,
    /// Winning state index and its component as sorted ids of the purged graph.
    pub winner: Option<(usize, Vec<VertexId>)>,
}

/// Phase 2 over an existing state set.
pub fn purge_states(
    g: &SignedGraph,
    states: &StateSet,
    criterion: Criterion,
    seed: u64,
) -> Result<PurgeOutcome, PurgeError> {
    let aux = AuxArrays::compute(g, states);
    let component = |i: usize| -> Result<Vec<VertexId>, PurgeError> {
        let state = &states.states[i];
        let mut rng = stream(seed, Purpose::VertexPurge, state.iteration);
        let plan = build_deletion_plan(g, state, i, criterion, &aux, &mut rng)?;
        Ok(apply_plan(g, state, &plan))
    };
    let sizes =
        (0..states.len()).into_par_iter().map(|i| component(i).map(|c| c.len())).collect::<Result<Vec<_>, _>>()?;
    let best = sizes.iter().enumerate().fold(None, |best: Option<(usize, usize)>, (i, &s)| match best {
        Some((_, bs)) if bs >= s => best,
        _ => Some((i, s)),
    });
    let winner = best.map(|(i, _)| component(i).map(|c| (i, c))).transpose()?;
    Ok(PurgeOutcome { sizes, winner })
}

/// The full pipeline: largest connected component, Phase 1, Phase 2.
pub fn run_abcd(g_raw: &SignedGraph, params: &AbcdParams) -> Result<AbcdResult, PurgeError> {
    let start = Instant::now();
    let (lcc, old_to_new) = g_raw.largest_connected_component();
    let mut new_to_old = vec![0; lcc.vertex_count()];
    for (old, new) in old_to_new.iter().enumerate() {
        if let Some(new) = new {
            new_to_old[*new as usize] = old as VertexId;
        }
    }
    let mut timings = PhaseTimings { lcc_seconds: start.elapsed().as_secs_f64(), ..Default::default() };
    let top_k = params.resolve_top_k(lcc.vertex_count());

    let mut result = AbcdResult {
        winner: Winner { vertices: Vec::new(), graph: g_raw.induced_subgraph(&[]).map_err(StateError::from)?.0 },
        winner_state_index: None,
        per_state_sizes: Vec::new(),
        iterations: params.iterations,
        top_k,
        criterion: params.criterion,
        seed: params.seed,
        lcc_vertices: lcc.vertex_count(),
        lcc_edges: lcc.edge_count(),
        min_frustration: None,
        max_frustration: None,
        timings,
    };
    if lcc.is_empty() {
        return Ok(result);
    }

    let t1 = Instant::now();
    let states = collect_topk_states(&lcc, params.iterations, top_k, params.seed)?;
    timings.phase1_seconds = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let PurgeOutcome { sizes, winner } = purge_states(&lcc, &states, params.criterion, params.seed)?;
    timings.phase2_seconds = t2.elapsed().as_secs_f64();

    if let Some((index, component)) = winner {
        let vertices: Vec<VertexId> = component.iter().map(|&v| new_to_old[v as usize]).collect();
        let (graph, _) = g_raw.induced_subgraph(&vertices).map_err(StateError::from)?;
        result.winner = Winner { vertices, graph };
        result.winner_state_index = Some(index);
    }
    result.per_state_sizes = sizes;
    result.min_frustration = states.min_frustration();
    result.max_frustration = states.max_frustration();
    result.timings = timings;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::{self, Negative as N, Positive as P};
    use crate::verify::{is_balanced, oracle_max_balanced, verify_result};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(candidates: Vec<EdgeId>, harary: Vec<bool>) -> BalancedState {
        BalancedState { candidates, harary, iteration: 0 }
    }

    fn set_of(states: Vec<BalancedState>) -> StateSet {
        let k = states.len();
        StateSet { states, iterations_run: k as u64, k_limit: k }
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    /// L(0)-R(1) is the switched edge. L has degree 3 and neighbor-degree sum 10,
    /// R has degree 4 and neighbor-degree sum 7.
    fn neighborhood_figure() -> SignedGraph {
        let mut edges = vec![(0, 1, N), (0, 2, P), (0, 3, P), (1, 4, P), (1, 5, P), (1, 6, P), (6, 7, P)];
        // vertices 2 and 3 need degree 3 each
        edges.extend([(2, 8, P), (2, 9, P), (3, 10, P), (3, 11, P)]);
        SignedGraph::new(12, edges).unwrap()
    }

    #[test]
    fn neighborhood_figure_values() {
        let g = neighborhood_figure();
        assert_eq!((g.degree(0), g.degree(1)), (3, 4));
        let nei = g.neighborhood_degree_sums(1);
        assert_eq!((nei[0], nei[1]), (10, 7));
    }

    #[test]
    fn degree_rule_deletes_smaller_degree() {
        let g = neighborhood_figure();
        let s = state(vec![0], vec![true; 12]);
        let aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        let v = select_victim(&g, &s, 0, Criterion::Degree, &aux, &mut rng()).unwrap();
        assert_eq!(v, Victim { vertex: 0, random: false });
    }

    #[test]
    fn harary_same_side_uses_neighborhood_sums() {
        let g = neighborhood_figure();
        // edge 0 is negative, so after switching it is positive and both ends share a side
        let s = state(vec![0], vec![true; 12]);
        let mut aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        aux.neighborhood = g.neighborhood_degree_sums(1);
        let v = select_victim(&g, &s, 0, Criterion::Harary, &aux, &mut rng()).unwrap();
        assert_eq!(v, Victim { vertex: 1, random: false });
    }

    #[test]
    fn harary_cross_edge_deletes_w_side() {
        let g = SignedGraph::new(2, [(0, 1, P)]).unwrap();
        let s = state(vec![0], vec![true, false]);
        let aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        assert_eq!(select_victim(&g, &s, 0, Criterion::Harary, &aux, &mut rng()).unwrap().vertex, 1);
        let s = state(vec![0], vec![false, true]);
        assert_eq!(select_victim(&g, &s, 0, Criterion::Harary, &aux, &mut rng()).unwrap().vertex, 0);
    }

    #[test]
    fn harary_inconsistent_state_is_an_error() {
        let g = SignedGraph::new(2, [(0, 1, P)]).unwrap();
        let s = state(vec![0], vec![true, true]);
        let aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        assert_eq!(
            select_victim(&g, &s, 0, Criterion::Harary, &aux, &mut rng()),
            Err(PurgeError::InconsistentHarary(0))
        );
    }

    #[test]
    fn ties() {
        let g = SignedGraph::new(2, [(0, 1, N)]).unwrap();
        let s = state(vec![0], vec![true, true]);
        let aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        assert_eq!(select_victim(&g, &s, 0, Criterion::Degree, &aux, &mut rng()).unwrap().vertex, 1);
        let mut seen = [false; 2];
        let mut r = rng();
        for _ in 0..64 {
            let v = select_victim(&g, &s, 0, Criterion::Status, &aux, &mut r).unwrap();
            assert!(v.random);
            seen[v.vertex as usize] = true;
            let v = select_victim(&g, &s, 0, Criterion::Harary, &aux, &mut r).unwrap();
            assert!(v.random);
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn status_rule_deletes_lower_status() {
        let g = SignedGraph::new(2, [(0, 1, N)]).unwrap();
        let s = state(vec![0], vec![true, true]);
        let mut aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        aux.status = Some(AdjustedStatus(vec![0.75, 0.25]));
        assert_eq!(
            select_victim(&g, &s, 0, Criterion::Status, &aux, &mut rng()).unwrap(),
            Victim { vertex: 1, random: false }
        );
        aux.status = None;
        assert_eq!(select_victim(&g, &s, 0, Criterion::Status, &aux, &mut rng()), Err(PurgeError::MissingStatus));
    }

    #[test]
    fn adjusted_status_examples() {
        let one = set_of(vec![state(vec![], vec![true, false, true])]);
        assert_eq!(adjusted_status(&one, 3).unwrap(), AdjustedStatus(vec![1.0, 0.0, 1.0]));
        let two = set_of(vec![state(vec![], vec![true, false]), state(vec![1], vec![true, true])]);
        assert_eq!(adjusted_status(&two, 2).unwrap(), AdjustedStatus(vec![1.0, 0.5]));
        assert_eq!(adjusted_status(&set_of(vec![]), 2), Err(PurgeError::EmptyStateSet));
    }

    #[test]
    fn empty_plan_for_balanced_state() {
        let g = SignedGraph::new(3, [(0, 1, P), (1, 2, N)]).unwrap();
        let s = state(vec![], vec![true, true, false]);
        let aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        let plan = build_deletion_plan(&g, &s, 0, Criterion::Harary, &aux, &mut rng()).unwrap();
        assert!(plan.removed.is_empty());
        assert_eq!(apply_plan(&g, &s, &plan), vec![0, 1, 2]);
    }

    #[test]
    fn skip_rule_shares_deleted_endpoint() {
        // switched edges 0-1 and 1-2 share vertex 1, which has the smaller degree
        let g = SignedGraph::new(4, [(0, 1, N), (1, 2, N), (0, 2, P), (2, 3, P), (0, 3, P)]).unwrap();
        let s = state(vec![0, 3], vec![true; 4]);
        let aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        assert_eq!(aux.degrees[1], 2);
        let plan = build_deletion_plan(&g, &s, 0, Criterion::Degree, &aux, &mut rng()).unwrap();
        assert_eq!(plan.removed, vec![1]);
    }

    #[test]
    fn triangle_plan_leaves_positive_path() {
        let g = SignedGraph::new(3, [(0, 1, P), (1, 2, P), (0, 2, N)]).unwrap();
        let s = state(vec![1], vec![true, true, true]);
        let aux = AuxArrays::compute(&g, &set_of(vec![s.clone()]));
        let plan = build_deletion_plan(&g, &s, 0, Criterion::Degree, &aux, &mut rng()).unwrap();
        assert_eq!(plan.removed, vec![2]);
        let kept = apply_plan(&g, &s, &plan);
        assert_eq!(kept, vec![0, 1]);
        let (sub, _) = g.induced_subgraph(&kept).unwrap();
        assert!(is_balanced(&sub).is_balanced());
        assert!(sub.edges().iter().all(|e| e.sign == P));
    }

    #[test]
    fn everything_deleted_is_empty() {
        let g = SignedGraph::new(2, [(0, 1, N)]).unwrap();
        let s = state(vec![0], vec![true, false]);
        let plan =
            DeletionPlan { state_index: 0, removed: vec![0, 1], criterion: Criterion::Degree, random_decisions: 0 };
        assert!(apply_plan(&g, &s, &plan).is_empty());
    }

    #[test]
    fn criterion_parsing() {
        for c in Criterion::ALL {
            assert_eq!(c.name().parse::<Criterion>(), Ok(c));
            assert_eq!(c.code().to_string().parse::<Criterion>(), Ok(c));
        }
        assert!("x".parse::<Criterion>().is_err());
        assert_eq!("auto".parse::<TopK>(), Ok(TopK::Auto));
        assert_eq!("12".parse::<TopK>(), Ok(TopK::Fixed(12)));
    }

    #[test]
    fn top_k_schedule() {
        assert_eq!(Profile::Paper.top_k(99_999), 4000);
        assert_eq!(Profile::Paper.top_k(100_000), 100);
        assert_eq!(Profile::Paper.top_k(300_000), 20);
        assert_eq!(Profile::Fast.top_k(10), 700);
        assert_eq!(Profile::Fast.top_k(200_000), 100);
        let p = AbcdParams::new(50, TopK::Auto, Criterion::Harary, 0);
        assert_eq!(p.resolve_top_k(10), 50);
    }

    #[test]
    fn balanced_input_keeps_whole_lcc() {
        let g = SignedGraph::new(5, [(0, 1, N), (1, 2, P), (2, 3, N), (0, 3, P)]).unwrap();
        for c in Criterion::ALL {
            let r = run_abcd(&g, &AbcdParams::new(20, TopK::Fixed(5), c, 3)).unwrap();
            assert_eq!(r.winner.vertices, vec![0, 1, 2, 3]);
            assert_eq!(r.min_frustration, Some(0));
        }
    }

    #[test]
    fn empty_graph_gives_empty_result() {
        let r = run_abcd(&SignedGraph::empty(), &AbcdParams::new(10, TopK::Auto, Criterion::Harary, 0)).unwrap();
        assert_eq!(r.winner.size(), 0);
        assert!(r.per_state_sizes.is_empty());
        assert_eq!(r.winner_state_index, None);
    }

    #[test]
    fn winner_reports_original_labels() {
        let raw = crate::graph::canonicalize([("x", "y", 1.0), ("y", "z", 1.0), ("x", "z", -1.0), ("p", "q", 1.0)]);
        let r = run_abcd(&raw, &AbcdParams::new(30, TopK::Fixed(3), Criterion::Degree, 1)).unwrap();
        assert_eq!(r.lcc_vertices, 3);
        assert_eq!(r.winner.size(), 2);
        assert!(r.winner.labels().iter().all(|l| ["x", "y", "z"].contains(&l.as_str())));
        assert!(verify_result(&raw, &r).unwrap().passed());
    }

    fn random_graph(n: usize, p: f64, neg: f64, seed: u64) -> SignedGraph {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                if r.gen_bool(p) {
                    edges.push((a, b, if r.gen_bool(neg) { N } else { P }));
                }
            }
        }
        SignedGraph::new(n, edges).unwrap()
    }

    /// Delete, filter and scan components with a plain BFS.
    fn reconstruct(g: &SignedGraph, state: &BalancedState, removed: &[VertexId]) -> Vec<VertexId> {
        let keep: Vec<VertexId> = (0..g.vertex_count() as VertexId).filter(|v| !removed.contains(v)).collect();
        let edges: Vec<(u32, u32, Sign)> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(id, e)| {
                !state.candidates.contains(&(*id as EdgeId)) && keep.contains(&e.u) && keep.contains(&e.v)
            })
            .map(|(_, e)| (e.u, e.v, e.sign))
            .collect();
        let h = SignedGraph::new(g.vertex_count(), edges).unwrap();
        let comps = h.connected_components();
        let mut best: Option<(usize, u32)> = None;
        for &v in &keep {
            let c = comps.component_of[v as usize];
            if best.is_none_or(|(s, _)| comps.sizes[c as usize] > s) {
                best = Some((comps.sizes[c as usize], c));
            }
        }
        best.map_or(Vec::new(), |(_, c)| keep.into_iter().filter(|&v| comps.component_of[v as usize] == c).collect())
    }

    #[test]
    fn apply_plan_matches_reconstruction() {
        for seed in 0..30 {
            let g = random_graph(12, 0.35, 0.4, seed).largest_connected_component().0;
            if g.vertex_count() < 2 {
                continue;
            }
            let states = collect_topk_states(&g, 40, 6, seed).unwrap();
            let aux = AuxArrays::compute(&g, &states);
            for (i, s) in states.states.iter().enumerate() {
                for c in Criterion::ALL {
                    let plan = build_deletion_plan(&g, s, i, c, &aux, &mut rng()).unwrap();
                    assert!(plan.removed.len() <= s.frustration());
                    for &e in &s.candidates {
                        let edge = g.edge(e);
                        assert!(plan.removed.contains(&edge.u) || plan.removed.contains(&edge.v));
                    }
                    let kept = apply_plan(&g, s, &plan);
                    assert_eq!(kept, reconstruct(&g, s, &plan.removed));
                    let (sub, _) = g.induced_subgraph(&kept).unwrap();
                    assert!(is_balanced(&sub).is_balanced());
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn winner_is_balanced_connected_and_bounded(
            n in 2usize..=12, p in 0.15f64..0.7, neg in 0.0f64..0.7, seed in any::<u64>(), c in 0usize..3
        ) {
            let g = random_graph(n, p, neg, seed);
            let r = run_abcd(&g, &AbcdParams::new(60, TopK::Fixed(10), Criterion::ALL[c], seed)).unwrap();
            let report = verify_result(&g, &r).unwrap();
            prop_assert!(report.passed());
            prop_assert_eq!(r.winner.size(), r.per_state_sizes.iter().copied().max().unwrap_or(0));
            let best = oracle_max_balanced(&g, true).unwrap();
            prop_assert!(r.winner.size() <= best.size);
        }

        #[test]
        fn adjusted_status_matches_direct_sum(seed in any::<u64>()) {
            let g = random_graph(10, 0.4, 0.4, seed).largest_connected_component().0;
            let states = collect_topk_states(&g, 30, 6, seed).unwrap();
            let status = adjusted_status(&states, g.vertex_count()).unwrap();
            for v in 0..g.vertex_count() {
                let count = states.states.iter().filter(|s| s.harary[v]).count();
                let expected = count as f64 / states.len() as f64;
                prop_assert!((status.0[v] - expected).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&status.0[v]));
            }
        }

        #[test]
        fn winner_size_non_decreasing_in_k(seed in any::<u64>(), c in 0usize..2) {
            let g = random_graph(14, 0.35, 0.35, seed);
            let criterion = [Criterion::Degree, Criterion::Harary][c];
            let mut last = 0;
            for k in [1usize, 2, 4, 8, 16] {
                let r = run_abcd(&g, &AbcdParams::new(40, TopK::Fixed(k), criterion, seed)).unwrap();
                prop_assert!(r.winner.size() >= last);
                last = r.winner.size();
            }
        }
    }
}
