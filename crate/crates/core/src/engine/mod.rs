//! The round-based GOSSIP kernel.
//!
//! In each round every node with an outgoing frontier edge activates one of
//! them uniformly at random. The activated set `A` is closed under reversal
//! (`A°`) and every activated pair exchanges what it knew before the round, so
//! information travels one hop per round.

mod knowledge;
mod rng;
mod trace;

pub use knowledge::{KnowledgeState, MessageId, MessageKind, RoundStats};
pub use rng::{purpose, RandomSource};
pub use trace::{parse_traces, write_traces, ProcessTrace};

use rand::Rng;
use thiserror::Error;

use crate::graph::{DirectedEdgeSet, Graph, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("closure is not symmetric: ({0}, {1}) present without its reverse")]
    AsymmetricClosure(NodeId, NodeId),
    #[error("size mismatch: expected {expected} nodes, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("round {round}: choice {u}->{w} is not an edge of the graph")]
    InvalidTrace { round: usize, u: NodeId, w: NodeId },
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// The edge each node initiates in one round (`None` = idle).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActivationSet {
    choices: Vec<Option<NodeId>>,
}

impl ActivationSet {
    pub fn new(choices: Vec<Option<NodeId>>) -> Self {
        ActivationSet { choices }
    }

    pub fn idle(n: usize) -> Self {
        ActivationSet { choices: vec![None; n] }
    }

    pub fn n(&self) -> usize {
        self.choices.len()
    }

    pub fn choice(&self, u: NodeId) -> Option<NodeId> {
        self.choices[u]
    }

    pub fn choices(&self) -> &[Option<NodeId>] {
        &self.choices
    }

    /// Chosen directed edges `(u, w)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.choices.iter().enumerate().filter_map(|(u, c)| c.map(|w| (u, w)))
    }
}

/// Every node with outgoing frontier edges picks one uniformly at random.
pub fn sample_activation(frontier: &DirectedEdgeSet, rng: &RandomSource, round: usize) -> ActivationSet {
    let choices = (0..frontier.n())
        .map(|u| {
            let out = frontier.out(u);
            match out.len() {
                0 => None,
                1 => Some(out[0]),
                k => Some(out[rng.rng(round as u64, u as u64).gen_range(0..k)]),
            }
        })
        .collect();
    ActivationSet { choices }
}

/// `A° = {(u,w) : (u,w) ∈ A or (w,u) ∈ A}`.
pub fn symmetric_closure(a: &ActivationSet) -> DirectedEdgeSet {
    let mut closure = DirectedEdgeSet::new(a.n());
    for (u, w) in a.edges() {
        closure.insert(u, w);
        closure.insert(w, u);
    }
    closure
}

/// Runs `tau` rounds of uniform gossip over `frontier`, updating `state` and
/// recording every activated set.
pub fn run_process(
    frontier: &DirectedEdgeSet,
    tau: usize,
    rng: &RandomSource,
    state: &mut KnowledgeState,
) -> Result<(ProcessTrace, RoundStats), EngineError> {
    if frontier.n() != state.n() {
        return Err(EngineError::SizeMismatch { expected: state.n(), got: frontier.n() });
    }
    let mut trace = ProcessTrace::new(frontier.n());
    let mut stats = RoundStats::default();
    for round in 0..tau {
        let a = sample_activation(frontier, rng, round);
        stats += state.apply_round(&symmetric_closure(&a))?;
        trace.push(a);
    }
    Ok((trace, stats))
}

/// Re-executes a recorded trace from `state`.
pub fn replay(g: &Graph, trace: &ProcessTrace, state: &mut KnowledgeState) -> Result<RoundStats, EngineError> {
    trace.validate(g)?;
    if trace.n() != state.n() {
        return Err(EngineError::SizeMismatch { expected: state.n(), got: trace.n() });
    }
    let mut stats = RoundStats::default();
    for a in trace.rounds() {
        stats += state.apply_round(&symmetric_closure(a))?;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn single_outgoing_edge_is_forced() {
        let frontier = DirectedEdgeSet::from_pairs(3, [(0, 2)]);
        for seed in 0..20 {
            let a = sample_activation(&frontier, &RandomSource::new(seed), 0);
            assert_eq!(a.choices(), &[Some(2), None, None]);
        }
    }

    #[test]
    fn empty_frontier_all_idle() {
        let a = sample_activation(&DirectedEdgeSet::new(5), &RandomSource::new(1), 0);
        assert_eq!(a, ActivationSet::idle(5));
    }

    #[test]
    fn choices_are_uniform() {
        let k = 5;
        let star = generate(&Family::Star { leaves: k }).unwrap();
        let frontier = DirectedEdgeSet::from_graph(&star);
        let mut counts = vec![0usize; k + 1];
        let samples = 10_000;
        let rng = RandomSource::new(77);
        for round in 0..samples {
            counts[sample_activation(&frontier, &rng, round).choice(0).unwrap()] += 1;
        }
        for &c in &counts[1..] {
            let freq = c as f64 / samples as f64;
            assert!((freq - 1.0 / k as f64).abs() <= 0.02, "{freq}");
        }
    }

    #[test]
    fn closure_examples() {
        let one = ActivationSet::new(vec![None, Some(2), None]);
        assert_eq!(symmetric_closure(&one), DirectedEdgeSet::from_pairs(3, [(1, 2), (2, 1)]));
        assert!(symmetric_closure(&ActivationSet::idle(3)).is_empty());
        let both = ActivationSet::new(vec![None, Some(2), Some(1)]);
        assert_eq!(symmetric_closure(&both), symmetric_closure(&one));
    }

    #[test]
    fn zero_rounds_and_two_nodes() {
        let g = generate(&Family::Path(2)).unwrap();
        let frontier = DirectedEdgeSet::from_graph(&g);
        let mut state = KnowledgeState::with_own_payloads(2);
        let (trace, _) = run_process(&frontier, 0, &RandomSource::new(0), &mut state).unwrap();
        assert!(trace.is_empty());
        assert_eq!(state, KnowledgeState::with_own_payloads(2));
        run_process(&frontier, 1, &RandomSource::new(0), &mut state).unwrap();
        assert!(state.knows_payload(0, 1) && state.knows_payload(1, 0));
    }

    #[test]
    fn replay_reproduces_run() {
        let g = generate(&Family::ErdosRenyi { n: 30, p: 0.15, seed: 2 }).unwrap();
        let frontier = DirectedEdgeSet::from_graph(&g);
        let mut live = KnowledgeState::with_own_payloads(30);
        let (trace, live_stats) = run_process(&frontier, 6, &RandomSource::new(5), &mut live).unwrap();
        let mut again = KnowledgeState::with_own_payloads(30);
        let stats = replay(&g, &trace, &mut again).unwrap();
        assert_eq!(again, live);
        assert_eq!(stats, live_stats);
        let mut untouched = KnowledgeState::with_own_payloads(30);
        replay(&g, &ProcessTrace::new(30), &mut untouched).unwrap();
        assert_eq!(untouched, KnowledgeState::with_own_payloads(30));
    }

    #[test]
    fn replay_rejects_foreign_edges() {
        let g = generate(&Family::Path(3)).unwrap();
        let mut trace = ProcessTrace::new(3);
        trace.push(ActivationSet::new(vec![Some(2), None, None]));
        let mut s = KnowledgeState::with_own_payloads(3);
        assert_eq!(replay(&g, &trace, &mut s), Err(EngineError::InvalidTrace { round: 0, u: 0, w: 2 }));
    }
}
