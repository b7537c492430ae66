//! Greedy baseline: every node contacts a uniformly random neighbor whose
//! payload it has not yet received.

use rand::Rng;

use super::{neighbor_exchange_complete, require_unweighted, ProtocolError};
use crate::engine::{purpose, symmetric_closure, ActivationSet, KnowledgeState, RandomSource, RoundStats};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineReport {
    pub rounds: usize,
    pub completed: bool,
    pub stats: RoundStats,
}

pub fn greedy_unheard_baseline(
    g: &Graph,
    rng: &RandomSource,
    round_cap: usize,
) -> Result<BaselineReport, ProtocolError> {
    require_unweighted(g)?;
    let n = g.n();
    let rng = rng.derive(purpose::BASELINE);
    let mut state = KnowledgeState::with_own_payloads(n);
    let mut report = BaselineReport { rounds: 0, completed: false, stats: RoundStats::default() };
    let mut unheard: Vec<NodeId> = Vec::new();
    while !neighbor_exchange_complete(g, &state) {
        if report.rounds >= round_cap {
            return Ok(report);
        }
        let choices = (0..n)
            .map(|u| {
                unheard.clear();
                unheard.extend(g.neighbors(u).filter(|&w| !state.knows_payload(u, w)));
                match unheard.len() {
                    0 => None,
                    k => Some(unheard[rng.rng(report.rounds as u64, u as u64).gen_range(0..k)]),
                }
            })
            .collect();
        report.stats += state.apply_round(&symmetric_closure(&ActivationSet::new(choices)))?;
        report.rounds += 1;
    }
    report.completed = true;
    Ok(report)
}
