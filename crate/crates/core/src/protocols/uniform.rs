//! Plain uniform gossip over all edges.

use super::{require_unweighted, ProtocolError};
use crate::engine::{
    purpose, run_process, sample_activation, symmetric_closure, KnowledgeState, MessageId, ProcessTrace,
    RandomSource, RoundStats,
};
use crate::graph::{DirectedEdgeSet, Graph, NodeId};

/// `rounds` rounds of uniform gossip from own payloads.
pub fn uniform_gossip(
    g: &Graph,
    rounds: usize,
    rng: &RandomSource,
) -> Result<(KnowledgeState, ProcessTrace, RoundStats), ProtocolError> {
    require_unweighted(g)?;
    let mut state = KnowledgeState::with_own_payloads(g.n());
    let frontier = DirectedEdgeSet::from_graph(g);
    let (trace, stats) = run_process(&frontier, rounds, &rng.derive(purpose::UNIFORM_GOSSIP), &mut state)?;
    Ok((state, trace, stats))
}

/// Rounds until a single rumor from `source` reaches every node, or `None`
/// if that takes more than `max_rounds`.
pub fn uniform_broadcast(
    g: &Graph,
    source: NodeId,
    max_rounds: usize,
    rng: &RandomSource,
) -> Result<Option<usize>, ProtocolError> {
    require_unweighted(g)?;
    let n = g.n();
    if source >= n {
        return Err(ProtocolError::InvalidConfig(format!("source {source} out of range for {n} nodes")));
    }
    let rng = rng.derive(purpose::UNIFORM_GOSSIP);
    let frontier = DirectedEdgeSet::from_graph(g);
    let mut state = KnowledgeState::new(n);
    let rumor = MessageId::payload(source);
    state.introduce(rumor, source);
    let mut informed = 1;
    for round in 0..max_rounds {
        if informed == n {
            return Ok(Some(round));
        }
        state.apply_round(&symmetric_closure(&sample_activation(&frontier, &rng, round)))?;
        informed = (0..n).filter(|&u| state.knows(u, &rumor)).count();
    }
    Ok((informed == n).then_some(max_rounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn broadcast_on_small_graphs() {
        let k2 = generate(&Family::Path(2)).unwrap();
        assert_eq!(uniform_broadcast(&k2, 0, 5, &RandomSource::new(0)).unwrap(), Some(1));
        let single = Graph::empty(1);
        assert_eq!(uniform_broadcast(&single, 0, 5, &RandomSource::new(0)).unwrap(), Some(0));
        let p4 = generate(&Family::Path(4)).unwrap();
        let r = uniform_broadcast(&p4, 0, 100, &RandomSource::new(0)).unwrap().unwrap();
        assert!(r >= 3);
        assert_eq!(uniform_broadcast(&p4, 0, 2, &RandomSource::new(0)).unwrap(), None);
    }

    #[test]
    fn gossip_runs_requested_rounds() {
        let g = generate(&Family::Cycle(6)).unwrap();
        let (state, trace, stats) = uniform_gossip(&g, 3, &RandomSource::new(2)).unwrap();
        assert_eq!(trace.len(), 3);
        assert_eq!(stats.rounds, 3);
        assert!((0..6).all(|u| state.count(u) >= 2));
    }
}
