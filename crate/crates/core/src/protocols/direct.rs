//! DirectExchange: deterministic neighbor exchange in `O(δ log n / ε²)`
//! rounds for graphs of hereditary density `δ`.
//!
//! The guess `δ'` starts at 1 and grows by `(1+ε)` per phase. A phase has
//! `⌈C_in · log₂ n / ε⌉` windows of `⌊δ'⌋` rounds. At the start of a window
//! every live node with at most `δ'` unheard neighbors contacts all of them,
//! one per round, and then terminates; the others wait out the window.

use super::{require_unweighted, ProtocolError};
use crate::engine::{symmetric_closure, ActivationSet, KnowledgeState, RoundStats};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectExchangeConfig {
    pub epsilon: f64,
    pub c_in: f64,
}

impl DirectExchangeConfig {
    pub const DEFAULT_C_IN: f64 = 4.0;

    pub fn new(epsilon: f64) -> Self {
        DirectExchangeConfig { epsilon, c_in: Self::DEFAULT_C_IN }
    }

    /// Windows per phase.
    pub fn windows(&self, n: usize) -> usize {
        let l = (self.c_in / self.epsilon * (n.max(2) as f64).log2()).ceil();
        (l as usize).max(1)
    }
}

/// Per node, the neighbors it initiates contact with, in round order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExchangeSchedule {
    pub contacts: Vec<Vec<NodeId>>,
}

impl ExchangeSchedule {
    pub fn n(&self) -> usize {
        self.contacts.len()
    }

    /// Rounds needed to replay the schedule with every node running through
    /// its list back to back.
    pub fn rounds(&self) -> usize {
        self.contacts.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn initiations(&self) -> Vec<usize> {
        self.contacts.iter().map(Vec::len).collect()
    }

    pub fn activation(&self, round: usize) -> ActivationSet {
        ActivationSet::new(self.contacts.iter().map(|c| c.get(round).copied()).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectExchangeReport {
    pub schedule: ExchangeSchedule,
    /// Rounds of the lockstep discovery run.
    pub rounds: usize,
    pub phases: usize,
    pub windows: usize,
    pub final_delta: f64,
}

impl DirectExchangeReport {
    pub fn initiations(&self) -> Vec<usize> {
        self.schedule.initiations()
    }

    pub fn max_initiations(&self) -> usize {
        self.initiations().into_iter().max().unwrap_or(0)
    }
}

pub fn direct_exchange(g: &Graph, epsilon: f64) -> Result<DirectExchangeReport, ProtocolError> {
    direct_exchange_with(g, DirectExchangeConfig::new(epsilon))
}

pub fn direct_exchange_with(g: &Graph, config: DirectExchangeConfig) -> Result<DirectExchangeReport, ProtocolError> {
    require_unweighted(g)?;
    let eps = config.epsilon;
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
        return Err(ProtocolError::InvalidConfig(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    if !(config.c_in.is_finite() && config.c_in > 0.0) {
        return Err(ProtocolError::InvalidConfig(format!("c_in must be positive, got {}", config.c_in)));
    }
    let n = g.n();
    let windows_per_phase = config.windows(n);
    let neighbors: Vec<Vec<NodeId>> = (0..n).map(|u| g.neighbors(u).collect()).collect();
    // heard[u][j]: u has exchanged with neighbors[u][j].
    let mut heard: Vec<Vec<bool>> = neighbors.iter().map(|nb| vec![false; nb.len()]).collect();
    let mut unheard: Vec<usize> = neighbors.iter().map(Vec::len).collect();
    let mut live: Vec<NodeId> = (0..n).collect();
    let mut schedule = ExchangeSchedule { contacts: vec![Vec::new(); n] };
    let mut report = DirectExchangeReport {
        schedule: ExchangeSchedule::default(),
        rounds: 0,
        phases: 0,
        windows: 0,
        final_delta: 1.0,
    };
    let mut delta = 1.0f64;
    let limit = (2 * g.max_degree() + 2) as f64;

    while !live.is_empty() {
        delta *= 1.0 + eps;
        report.phases += 1;
        if delta > limit * (1.0 + eps) {
            return Err(ProtocolError::NonConvergence { delta });
        }
        let window = (delta.floor() as usize).max(1);
        for _ in 0..windows_per_phase {
            if live.is_empty() {
                break;
            }
            let (ready, waiting): (Vec<NodeId>, Vec<NodeId>) =
                live.iter().partition(|&&v| unheard[v] as f64 <= delta);
            let mut mark = |u: NodeId, w: NodeId, heard: &mut Vec<Vec<bool>>| {
                let j = neighbors[u].binary_search(&w).expect("neighbor");
                if !heard[u][j] {
                    heard[u][j] = true;
                    unheard[u] -= 1;
                }
            };
            for &v in &ready {
                let list: Vec<NodeId> =
                    neighbors[v].iter().zip(&heard[v]).filter(|(_, &h)| !h).map(|(&w, _)| w).collect();
                schedule.contacts[v] = list;
            }
            for &v in &ready {
                for &w in &schedule.contacts[v] {
                    mark(v, w, &mut heard);
                    mark(w, v, &mut heard);
                }
            }
            live = waiting;
            report.windows += 1;
            report.rounds += window;
        }
    }
    report.final_delta = delta;
    report.schedule = schedule;
    Ok(report)
}

/// Checks that `schedule` covers every edge of `g` using only edges of `g`;
/// returns the replay length.
pub fn schedule_replay(g: &Graph, schedule: &ExchangeSchedule) -> Result<usize, ProtocolError> {
    if schedule.n() != g.n() {
        return Err(ProtocolError::ScheduleGraphMismatch(format!(
            "schedule has {} nodes, graph has {}",
            schedule.n(),
            g.n()
        )));
    }
    for (u, list) in schedule.contacts.iter().enumerate() {
        if let Some(&w) = list.iter().find(|&&w| !g.has_edge(u, w)) {
            return Err(ProtocolError::ScheduleGraphMismatch(format!("{u}->{w} is not an edge")));
        }
    }
    let sorted: Vec<Vec<NodeId>> = schedule
        .contacts
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.sort_unstable();
            l
        })
        .collect();
    for (u, w, _) in g.edges() {
        if sorted[u].binary_search(&w).is_err() && sorted[w].binary_search(&u).is_err() {
            return Err(ProtocolError::ScheduleGraphMismatch(format!("edge {{{u},{w}}} is never contacted")));
        }
    }
    Ok(schedule.rounds())
}

/// Plays the schedule on `state`: in round `k` node `u` contacts
/// `contacts[u][k]`, if any.
pub fn execute_schedule(
    g: &Graph,
    schedule: &ExchangeSchedule,
    state: &mut KnowledgeState,
) -> Result<RoundStats, ProtocolError> {
    let rounds = schedule_replay(g, schedule)?;
    if state.n() != g.n() {
        return Err(ProtocolError::InvalidConfig("knowledge state size differs from graph".into()));
    }
    let mut stats = RoundStats::default();
    for k in 0..rounds {
        stats += state.apply_round(&symmetric_closure(&schedule.activation(k)))?;
    }
    Ok(stats)
}
