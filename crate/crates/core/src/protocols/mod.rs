//! GOSSIP-model protocols built on the engine.

mod baseline;
mod direct;
mod superstep;
mod uniform;

pub use baseline::{greedy_unheard_baseline, BaselineReport};
pub use direct::{
    direct_exchange, direct_exchange_with, execute_schedule, schedule_replay, DirectExchangeConfig, DirectExchangeReport,
    ExchangeSchedule,
};
pub use superstep::{
    default_tau, iteration_cap, rumor_by_superstep, superstep, superstep_with, IterationRecord,
    RumorReport, SuperstepConfig, SuperstepReport, DEFAULT_TAU_CONSTANT,
};
pub use uniform::{uniform_broadcast, uniform_gossip};

use thiserror::Error;

use crate::engine::{EngineError, KnowledgeState};
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("frontier still holds {remaining} directed edges after the cap of {cap} iterations")]
    IterationCapExceeded { cap: usize, remaining: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("no termination before δ' = {delta}")]
    NonConvergence { delta: f64 },
    #[error("schedule does not match graph: {0}")]
    ScheduleGraphMismatch(String),
    #[error("protocols run on unweighted, loop-free graphs only")]
    NotUnweighted,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

pub(crate) fn require_unweighted(g: &Graph) -> Result<(), ProtocolError> {
    if g.is_unweighted() {
        Ok(())
    } else {
        Err(ProtocolError::NotUnweighted)
    }
}

/// Whether every pair of neighbors holds each other's payload.
pub fn neighbor_exchange_complete(g: &Graph, state: &KnowledgeState) -> bool {
    g.edges().all(|(u, w, _)| state.knows_payload(u, w) && state.knows_payload(w, u))
}
