//! Deterministic simulation of the GOSSIP and LOCAL models of distributed
//! computation.
//!
//! * [`graph`]: weighted graphs, conductance, hereditary density, generators.
//! * [`engine`]: uniform-gossip rounds, knowledge propagation, recorded traces.
//! * [`protocols`]: Superstep, DirectExchange, the greedy baseline.
//! * [`decompose`]: exact conductance decomposition used as a test oracle.
//! * [`spanner`]: spanners extracted from gossip traces, stretch checks.
//! * [`simulate`]: LOCAL reference executor and GOSSIP simulators.

pub mod decompose;
pub mod engine;
pub mod graph;
pub mod protocols;
pub mod simulate;
pub mod spanner;
