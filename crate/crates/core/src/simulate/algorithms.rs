use super::{LocalAlgorithm, Tape};
use crate::graph::{Graph, NodeId};

fn eccentricity(g: &Graph, source: NodeId) -> usize {
    g.bfs_distances(source).into_iter().flatten().max().unwrap_or(0)
}

/// Hop distance from `source`, learned by flooding for `horizon` rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flooding {
    pub source: NodeId,
    pub horizon: usize,
}

impl Flooding {
    /// Horizon set to the eccentricity of `source`, so every reachable node
    /// learns its distance.
    pub fn new(g: &Graph, source: NodeId) -> Self {
        Flooding { source, horizon: eccentricity(g, source) }
    }
}

#[derive(Clone, Debug)]
pub struct FloodState {
    dist: Option<usize>,
    rounds: usize,
}

impl LocalAlgorithm for Flooding {
    type State = FloodState;
    type Message = Option<usize>;
    type Output = Option<usize>;

    fn name(&self) -> String {
        "flooding".into()
    }

    fn init(&self, node: NodeId, _: &[NodeId], _: &Tape) -> FloodState {
        FloodState { dist: (node == self.source).then_some(0), rounds: 0 }
    }

    fn message(&self, s: &FloodState) -> Option<usize> {
        s.dist
    }

    fn round(&self, s: &mut FloodState, inbox: &[(NodeId, Option<usize>)]) {
        if s.dist.is_none() {
            s.dist = inbox.iter().filter_map(|&(_, d)| d).min().map(|d| d + 1);
        }
        s.rounds += 1;
    }

    fn halted(&self, s: &FloodState) -> bool {
        s.rounds >= self.horizon
    }

    fn output(&self, s: &FloodState) -> Option<usize> {
        s.dist
    }
}

/// BFS tree from `root`: hop distance plus a parent drawn from the tape among
/// the neighbors that announced the smallest distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BfsLabeling {
    pub root: NodeId,
    pub horizon: usize,
}

impl BfsLabeling {
    pub fn new(g: &Graph, root: NodeId) -> Self {
        BfsLabeling { root, horizon: eccentricity(g, root) }
    }
}

#[derive(Clone, Debug)]
pub struct BfsState {
    dist: Option<usize>,
    parent: Option<NodeId>,
    pick: u64,
    rounds: usize,
}

impl LocalAlgorithm for BfsLabeling {
    type State = BfsState;
    type Message = Option<usize>;
    type Output = (Option<usize>, Option<NodeId>);

    fn name(&self) -> String {
        "bfs".into()
    }

    fn init(&self, node: NodeId, _: &[NodeId], tape: &Tape) -> BfsState {
        BfsState { dist: (node == self.root).then_some(0), parent: None, pick: tape.value(0), rounds: 0 }
    }

    fn message(&self, s: &BfsState) -> Option<usize> {
        s.dist
    }

    fn round(&self, s: &mut BfsState, inbox: &[(NodeId, Option<usize>)]) {
        if s.dist.is_none() {
            if let Some(best) = inbox.iter().filter_map(|&(_, d)| d).min() {
                let candidates: Vec<NodeId> =
                    inbox.iter().filter(|&&(_, d)| d == Some(best)).map(|&(w, _)| w).collect();
                s.dist = Some(best + 1);
                s.parent = Some(candidates[(s.pick % candidates.len() as u64) as usize]);
            }
        }
        s.rounds += 1;
    }

    fn halted(&self, s: &BfsState) -> bool {
        s.rounds >= self.horizon
    }

    fn output(&self, s: &BfsState) -> (Option<usize>, Option<NodeId>) {
        (s.dist, s.parent)
    }
}

/// One round: every node learns its neighbors' ids and tape tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborCollection;

#[derive(Clone, Debug)]
pub struct CollectState {
    token: u64,
    heard: Vec<(NodeId, u64)>,
    done: bool,
}

impl LocalAlgorithm for NeighborCollection {
    type State = CollectState;
    type Message = u64;
    type Output = Vec<(NodeId, u64)>;

    fn name(&self) -> String {
        "neighbors".into()
    }

    fn init(&self, _: NodeId, _: &[NodeId], tape: &Tape) -> CollectState {
        CollectState { token: tape.value(0), heard: Vec::new(), done: false }
    }

    fn message(&self, s: &CollectState) -> u64 {
        s.token
    }

    fn round(&self, s: &mut CollectState, inbox: &[(NodeId, u64)]) {
        s.heard = inbox.to_vec();
        s.done = true;
    }

    fn halted(&self, s: &CollectState) -> bool {
        s.done
    }

    fn output(&self, s: &CollectState) -> Vec<(NodeId, u64)> {
        s.heard.clone()
    }
}

/// Halts before the first round and outputs the node id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Silent;

impl LocalAlgorithm for Silent {
    type State = NodeId;
    type Message = ();
    type Output = NodeId;

    fn name(&self) -> String {
        "silent".into()
    }

    fn init(&self, node: NodeId, _: &[NodeId], _: &Tape) -> NodeId {
        node
    }

    fn message(&self, _: &NodeId) {}

    fn round(&self, _: &mut NodeId, _: &[(NodeId, ())]) {}

    fn halted(&self, _: &NodeId) -> bool {
        true
    }

    fn output(&self, s: &NodeId) -> NodeId {
        *s
    }
}
