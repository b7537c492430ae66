//! Superstep: NeighborExchange by uniform gossip on a shrinking frontier.
//!
//! Each iteration runs uniform gossip over the frontier `F_i` carrying fresh
//! markers `a(v)`, then replays the same activations in reverse order carrying
//! fresh markers `b(v)`. A directed edge `(u, w)` leaves the frontier once `u`
//! has seen `a(w)` or `b(w)`; by the reversal property the pruned set, and
//! hence the next frontier, stays symmetric.

use super::{require_unweighted, ProtocolError};
use crate::engine::{
    purpose, replay, run_process, KnowledgeState, MessageId, MessageKind, ProcessTrace, RandomSource,
    RoundStats,
};
use crate::graph::{ceil_log2, DirectedEdgeSet, Graph, NodeId};

pub const DEFAULT_TAU_CONSTANT: f64 = 2.0;

/// `⌈c · log₂(2m)²⌉`.
pub fn default_tau(m: usize, c_tau: f64) -> Result<usize, ProtocolError> {
    if !(c_tau.is_finite() && c_tau > 0.0) {
        return Err(ProtocolError::InvalidConfig(format!("tau constant must be positive, got {c_tau}")));
    }
    if m == 0 {
        return Err(ProtocolError::InvalidConfig("tau needs at least one edge".into()));
    }
    let l = (2.0 * m as f64).log2();
    Ok((c_tau * l * l).ceil() as usize)
}

/// `4·⌈log₂(2m+2)⌉ + 8`.
pub fn iteration_cap(m: usize) -> usize {
    4 * ceil_log2(2 * m + 2) + 8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuperstepConfig {
    pub tau: usize,
    /// Defaults to [`iteration_cap`] of the graph.
    pub max_iterations: Option<usize>,
}

impl SuperstepConfig {
    pub fn new(tau: usize) -> Self {
        SuperstepConfig { tau, max_iterations: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    pub frontier_size: usize,
    pub pruned_size: usize,
    /// `F_i` was symmetric.
    pub symmetry_ok: bool,
    /// `X_uw = Y_wu` on every frontier edge.
    pub reversal_ok: bool,
    /// Every pruned pair holds each other's payload.
    pub exchange_ok: bool,
}

#[derive(Clone, Debug)]
pub struct SuperstepReport {
    pub tau: usize,
    pub iterations: usize,
    pub records: Vec<IterationRecord>,
    /// `2τ` per iteration.
    pub total_rounds: usize,
    /// Unordered pairs `(u, w)`, `u < w`, pruned so far.
    pub exchanged: Vec<(NodeId, NodeId)>,
    pub completed: bool,
    pub stats: RoundStats,
    /// `K_i` for every iteration (forward half only).
    pub traces: Vec<ProcessTrace>,
}

impl SuperstepReport {
    /// The rounds as executed: `K_0, K_0^rev, K_1, K_1^rev, …`.
    pub fn executed_traces(&self) -> Vec<ProcessTrace> {
        self.traces.iter().flat_map(|k| [k.clone(), k.reverse()]).collect()
    }

    /// All exact per-iteration invariants held.
    pub fn invariants_ok(&self) -> bool {
        self.records.iter().all(|r| r.symmetry_ok && r.reversal_ok && r.exchange_ok)
    }
}

/// One Superstep invocation from every node knowing only its own payload.
pub fn superstep(g: &Graph, tau: usize, rng: &RandomSource) -> Result<SuperstepReport, ProtocolError> {
    let mut state = KnowledgeState::with_own_payloads(g.n());
    superstep_with(g, SuperstepConfig::new(tau), &rng.derive(purpose::SUPERSTEP), &mut state)
}

/// One Superstep invocation over an existing knowledge state; payloads
/// already known keep travelling with every exchange.
pub fn superstep_with(
    g: &Graph,
    config: SuperstepConfig,
    rng: &RandomSource,
    state: &mut KnowledgeState,
) -> Result<SuperstepReport, ProtocolError> {
    require_unweighted(g)?;
    if config.tau == 0 {
        return Err(ProtocolError::InvalidConfig("tau must be at least 1".into()));
    }
    if state.n() != g.n() {
        return Err(ProtocolError::InvalidConfig("knowledge state size differs from graph".into()));
    }
    let cap = config.max_iterations.unwrap_or_else(|| iteration_cap(g.m()));
    let n = g.n();
    let mut frontier = DirectedEdgeSet::from_graph(g);
    let mut report = SuperstepReport {
        tau: config.tau,
        iterations: 0,
        records: Vec::new(),
        total_rounds: 0,
        exchanged: Vec::new(),
        completed: false,
        stats: RoundStats::default(),
        traces: Vec::new(),
    };

    while !frontier.is_empty() {
        let i = report.iterations;
        if i >= cap {
            return Err(ProtocolError::IterationCapExceeded { cap, remaining: frontier.len() });
        }
        let tag = i as u32;
        let symmetry_ok = frontier.is_symmetric();
        let marker = |kind, origin| MessageId { kind, origin, tag };

        // First half: fresh a(v), gossip over F_i, read X.
        state.introduce_own(MessageKind::AuxA, tag);
        let (trace, stats) = run_process(&frontier, config.tau, &rng.derive(i as u64), state)?;
        report.stats += stats;
        let x: Vec<Vec<bool>> = (0..n)
            .map(|u| frontier.out(u).iter().map(|&w| state.knows(u, &marker(MessageKind::AuxA, w))).collect())
            .collect();
        state.discard(|id| id.kind == MessageKind::AuxA);

        // Second half: fresh b(v), the reversed process, read Y.
        state.introduce_own(MessageKind::AuxB, tag);
        report.stats += replay(g, &trace.reverse(), state)?;
        let y: Vec<Vec<bool>> = (0..n)
            .map(|u| frontier.out(u).iter().map(|&w| state.knows(u, &marker(MessageKind::AuxB, w))).collect())
            .collect();
        state.discard(|id| id.kind == MessageKind::AuxB);

        let mut reversal_ok = true;
        let mut exchange_ok = true;
        let mut pruned = DirectedEdgeSet::new(n);
        for u in 0..n {
            for (j, &w) in frontier.out(u).iter().enumerate() {
                if let Ok(k) = frontier.out(w).binary_search(&u) {
                    reversal_ok &= x[u][j] == y[w][k];
                }
                if x[u][j] || y[u][j] {
                    pruned.insert(u, w);
                    exchange_ok &= state.knows_payload(u, w) && state.knows_payload(w, u);
                    if u < w {
                        report.exchanged.push((u, w));
                    }
                }
            }
        }
        // A pair pruned from only one side still counts once.
        for (u, w) in pruned.iter() {
            if u > w && !pruned.contains(w, u) {
                report.exchanged.push((w, u));
            }
        }
        report.records.push(IterationRecord {
            frontier_size: frontier.len(),
            pruned_size: pruned.len(),
            symmetry_ok,
            reversal_ok,
            exchange_ok,
        });
        frontier.remove_all(&pruned);
        report.traces.push(trace);
        report.iterations += 1;
        report.total_rounds += 2 * config.tau;
    }
    report.exchanged.sort_unstable();
    report.completed = true;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RumorReport {
    pub invocations: usize,
    pub total_rounds: usize,
    pub completed: bool,
    pub diameter: usize,
    pub invariants_ok: bool,
}

impl RumorReport {
    pub fn within_diameter(&self) -> bool {
        self.invocations <= self.diameter
    }
}

/// Repeats Superstep until every node holds every payload.
pub fn rumor_by_superstep(g: &Graph, tau: usize, rng: &RandomSource) -> Result<RumorReport, ProtocolError> {
    require_unweighted(g)?;
    let diameter = g.diameter().ok_or(ProtocolError::Disconnected)?;
    let n = g.n();
    let mut state = KnowledgeState::with_own_payloads(n);
    let base = rng.derive(purpose::SUPERSTEP);
    let mut report =
        RumorReport { invocations: 0, total_rounds: 0, completed: false, diameter, invariants_ok: true };
    let everyone_knows = |s: &KnowledgeState| (0..n).all(|u| s.count(u) == n);
    while !everyone_knows(&state) {
        if report.invocations >= n {
            return Ok(report);
        }
        let step = superstep_with(g, SuperstepConfig::new(tau), &base.derive(report.invocations as u64), &mut state)?;
        report.invocations += 1;
        report.total_rounds += step.total_rounds;
        report.invariants_ok &= step.invariants_ok();
    }
    report.completed = true;
    Ok(report)
}
