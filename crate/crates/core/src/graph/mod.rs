//! Weighted undirected graphs with self-loops.
//!
//! Weights follow the convention `w_uv = w_vu`, absent edges have weight 0,
//! and a loop of weight `a` at `u` is stored as `w_uu = 2a` so that both of
//! its ends count toward the volume of `u`.

mod conductance;
mod density;
mod edges;
mod generate;
mod io;

pub use conductance::{
    set_conductance, strongly_induced, Conductance, ConductanceMode, EXACT_LIMIT,
};
pub(crate) use conductance::{positive_volume, spectral_sweep, DenseView};
pub use density::{hereditary_density, orientation_feasible};
pub use edges::DirectedEdgeSet;
pub use generate::{generate, Family};
pub(crate) use generate::ceil_log2;
pub use io::{parse_edge_list, read_edge_list, write_edge_list};

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Dense node identifier in `[0, n)`.
pub type NodeId = usize;

/// Absolute tolerance for threshold comparisons on weights and ratios.
pub const WEIGHT_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("duplicate member {0} in vertex set")]
    DuplicateMember(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("invalid weight {weight} on edge ({u}, {v})")]
    InvalidWeight { u: NodeId, v: NodeId, weight: f64 },
    #[error("vertex sets overlap at node {0}")]
    OverlappingSets(NodeId),
    #[error("cut side has zero volume")]
    ZeroVolume,
    #[error("set of size {size} exceeds the exact enumeration limit {limit}")]
    TooLargeForExact { size: usize, limit: usize },
    #[error("conductance needs a set of at least two nodes, got {0}")]
    SetTooSmall(usize),
    #[error("operation requires an unweighted, loop-free graph")]
    NotUnweighted,
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("vertex set universe {set} does not match graph size {graph}")]
    UniverseMismatch { set: usize, graph: usize },
    #[error("adjacency is not symmetric at ({0}, {1})")]
    Asymmetric(NodeId, NodeId),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// An immutable weighted undirected graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    /// Per-node neighbor lists sorted by neighbor id; never contains `u` itself.
    adjacency: Vec<Vec<(NodeId, f64)>>,
    /// `w_uu` for every node.
    self_loops: Vec<f64>,
    volumes: Vec<f64>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from undirected weighted edges. A pair `(u, u, w)` stores
    /// `w_uu = 2w`. Zero weights are dropped; repeated pairs are rejected.
    pub fn from_weighted_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut adjacency: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
        let mut self_loops = vec![0.0; n];
        let mut seen_loop = vec![false; n];
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(GraphError::InvalidWeight { u, v, weight: w });
            }
            if u == v {
                if seen_loop[u] {
                    return Err(GraphError::DuplicateEdge(u, v));
                }
                seen_loop[u] = true;
                self_loops[u] = 2.0 * w;
                continue;
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_by_key(|&(v, _)| v);
            if let Some(pair) = list.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(GraphError::DuplicateEdge(u.min(pair[0].0), u.max(pair[0].0)));
            }
            list.retain(|&(_, w)| w > 0.0);
        }
        Ok(Self::assemble(adjacency, self_loops))
    }

    /// Builds an unweighted graph from undirected edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::from_weighted_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    /// A graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Self::assemble(vec![Vec::new(); n], vec![0.0; n])
    }

    /// Builds from raw parts; `self_loops` holds `w_uu` directly.
    pub(crate) fn from_parts(
        adjacency: Vec<Vec<(NodeId, f64)>>,
        self_loops: Vec<f64>,
    ) -> Result<Self, GraphError> {
        let g = Self::assemble(adjacency, self_loops);
        g.check_symmetry()?;
        Ok(g)
    }

    fn assemble(adjacency: Vec<Vec<(NodeId, f64)>>, self_loops: Vec<f64>) -> Self {
        let volumes = adjacency
            .iter()
            .zip(&self_loops)
            .map(|(list, &l)| l + list.iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adjacency, self_loops, volumes, edge_count }
    }

    /// Verifies `w_uv = w_vu` for every stored pair.
    pub fn check_symmetry(&self) -> Result<(), GraphError> {
        for (u, list) in self.adjacency.iter().enumerate() {
            for &(v, w) in list {
                if v >= self.n() {
                    return Err(GraphError::NodeOutOfRange { node: v, n: self.n() });
                }
                if v == u || (self.weight(v, u) - w).abs() > WEIGHT_EPS {
                    return Err(GraphError::Asymmetric(u, v));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges between distinct nodes.
    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: NodeId) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.adjacency[u].iter().map(|&(v, _)| v)
    }

    pub fn weighted_neighbors(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> f64 {
        if u == v {
            return self.self_loops[u];
        }
        match self.adjacency[u].binary_search_by_key(&v, |&(x, _)| x) {
            Ok(i) => self.adjacency[u][i].1,
            Err(_) => 0.0,
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.adjacency[u].binary_search_by_key(&v, |&(x, _)| x).is_ok()
    }

    pub fn self_loop(&self, u: NodeId) -> f64 {
        self.self_loops[u]
    }

    /// `vol({u})`, self-loop included.
    pub fn node_volume(&self, u: NodeId) -> f64 {
        self.volumes[u]
    }

    /// Undirected edges `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter().filter(move |&&(v, _)| u < v).map(move |&(v, w)| (u, v, w))
        })
    }

    /// True when every edge has weight 1 and there are no self-loops.
    pub fn is_unweighted(&self) -> bool {
        self.self_loops.iter().all(|&l| l == 0.0)
            && self.adjacency.iter().flatten().all(|&(_, w)| w == 1.0)
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Largest hop distance over all pairs, or `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n() {
            for d in self.bfs_distances(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Total volume `vol(V)`.
    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }
}

/// A set of node ids inside an ambient graph on `universe` nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    members: Vec<NodeId>,
    universe: usize,
}

impl VertexSet {
    pub fn new<I>(universe: usize, members: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = NodeId>,
    {
        let mut members: Vec<NodeId> = members.into_iter().collect();
        members.sort_unstable();
        if let Some(&node) = members.iter().find(|&&v| v >= universe) {
            return Err(GraphError::NodeOutOfRange { node, n: universe });
        }
        if let Some(pair) = members.windows(2).find(|p| p[0] == p[1]) {
            return Err(GraphError::DuplicateMember(pair[0]));
        }
        Ok(VertexSet { members, universe })
    }

    /// Caller guarantees `members` is sorted, unique and in range.
    pub(crate) fn from_sorted(universe: usize, members: Vec<NodeId>) -> Self {
        debug_assert!(members.windows(2).all(|p| p[0] < p[1]));
        debug_assert!(members.last().is_none_or(|&v| v < universe));
        VertexSet { members, universe }
    }

    pub fn all(universe: usize) -> Self {
        VertexSet { members: (0..universe).collect(), universe }
    }

    pub fn empty(universe: usize) -> Self {
        VertexSet { members: Vec::new(), universe }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.members.iter().copied()
    }

    /// `self − other`.
    pub fn minus(&self, other: &VertexSet) -> VertexSet {
        let members = self.members.iter().copied().filter(|&v| !other.contains(v)).collect();
        VertexSet { members, universe: self.universe }
    }

    /// `V − self`.
    pub fn complement(&self) -> VertexSet {
        VertexSet::all(self.universe).minus(self)
    }

    pub fn first_common(&self, other: &VertexSet) -> Option<NodeId> {
        self.members.iter().copied().find(|&v| other.contains(v))
    }

    pub(crate) fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.universe];
        for &v in &self.members {
            mask[v] = true;
        }
        mask
    }

    fn check_in(&self, g: &Graph) -> Result<(), GraphError> {
        if self.universe != g.n() {
            return Err(GraphError::UniverseMismatch { set: self.universe, graph: g.n() });
        }
        Ok(())
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// `vol(S) = w(S, V)`.
pub fn volume(g: &Graph, s: &VertexSet) -> f64 {
    s.iter().map(|u| g.node_volume(u)).sum()
}

/// `w(S, T) = Σ_{u∈S, v∈T} w_uv`; the sets may overlap.
pub fn cut_weight(g: &Graph, s: &VertexSet, t: &VertexSet) -> f64 {
    let in_t = t.mask();
    let mut total = 0.0;
    for u in s.iter() {
        if in_t[u] {
            total += g.self_loop(u);
        }
        total += g
            .weighted_neighbors(u)
            .iter()
            .filter(|&&(v, _)| in_t[v])
            .map(|&(_, w)| w)
            .sum::<f64>();
    }
    total
}

/// `φ(S, T) = w(S, T) / min{vol(S), vol(T)}` for disjoint `S`, `T`.
pub fn cut_conductance(g: &Graph, s: &VertexSet, t: &VertexSet) -> Result<f64, GraphError> {
    s.check_in(g)?;
    t.check_in(g)?;
    if let Some(v) = s.first_common(t) {
        return Err(GraphError::OverlappingSets(v));
    }
    let denom = volume(g, s).min(volume(g, t));
    if denom <= 0.0 {
        return Err(GraphError::ZeroVolume);
    }
    Ok(cut_weight(g, s, t) / denom)
}
