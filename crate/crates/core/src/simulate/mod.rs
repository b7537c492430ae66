//! LOCAL algorithms and their simulation in the GOSSIP model.
//!
//! [`run_local`] is the reference executor: in every round each node that has
//! not halted broadcasts one message to all neighbors, then processes its
//! inbox. A simulator realizes each such round with GOSSIP rounds instead, by
//! solving NeighborExchange over the round's broadcasts, and must reproduce
//! the reference outputs exactly for the same random tapes.

mod algorithms;
mod gather;

pub use algorithms::{BfsLabeling, Flooding, NeighborCollection, Silent};
pub use gather::{gatherize, Gatherized};

use std::fmt::{self, Debug, Write as _};

use thiserror::Error;

use crate::engine::{purpose, symmetric_closure, ActivationSet, KnowledgeState, RandomSource};
use crate::graph::{Graph, GraphError, NodeId};
use crate::protocols::{
    direct_exchange, execute_schedule, superstep_with, ExchangeSchedule, ProtocolError, SuperstepConfig,
};
use crate::spanner::{verify_stretch, SpannerError, SpannerResult, StretchMode};

pub const DEFAULT_ROUND_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("algorithm still running after {cap} LOCAL rounds")]
    RoundCapExceeded { cap: usize },
    #[error("spanner is not certified for this simulation: {0}")]
    UncertifiedSpanner(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Spanner(#[from] SpannerError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A node's pre-drawn random bits, addressed by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tape {
    source: RandomSource,
}

impl Tape {
    pub fn new(tape_seed: u64, node: NodeId) -> Self {
        Tape { source: RandomSource::new(tape_seed).derive(purpose::TAPE).derive(node as u64) }
    }

    pub fn value(&self, index: u64) -> u64 {
        use rand::Rng;
        self.source.rng(index, 0).gen()
    }
}

/// A synchronous LOCAL-model algorithm. Each round, every node that has not
/// halted broadcasts [`message`](Self::message) and then runs
/// [`round`](Self::round) on the messages of its non-halted neighbors.
pub trait LocalAlgorithm {
    type State: Clone;
    type Message: Clone;
    type Output: Clone + PartialEq + Debug;

    fn name(&self) -> String;
    fn init(&self, node: NodeId, neighbors: &[NodeId], tape: &Tape) -> Self::State;
    fn message(&self, state: &Self::State) -> Self::Message;
    /// `inbox` is sorted by sender.
    fn round(&self, state: &mut Self::State, inbox: &[(NodeId, Self::Message)]);
    fn halted(&self, state: &Self::State) -> bool;
    fn output(&self, state: &Self::State) -> Self::Output;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InnerSimulator {
    DirectExchange { epsilon: f64 },
    RoundRobin,
    Superstep { tau: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SimulatorKind {
    Reference,
    Superstep,
    RoundRobin,
    DirectExchange,
    Spanner(InnerSimulator),
}

impl fmt::Display for SimulatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimulatorKind::Reference => f.write_str("local"),
            SimulatorKind::Superstep => f.write_str("sim-superstep"),
            SimulatorKind::RoundRobin => f.write_str("sim-round-robin"),
            SimulatorKind::DirectExchange => f.write_str("sim-direct-exchange"),
            SimulatorKind::Spanner(inner) => {
                let inner = match inner {
                    InnerSimulator::DirectExchange { .. } => "direct-exchange",
                    InnerSimulator::RoundRobin => "round-robin",
                    InnerSimulator::Superstep { .. } => "superstep",
                };
                write!(f, "sim-spanner-{inner}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationOutcome<O> {
    pub outputs: Vec<O>,
    /// LOCAL rounds `T` of the algorithm.
    pub model_rounds: usize,
    /// GOSSIP rounds spent (0 for the reference).
    pub gossip_rounds: usize,
    pub kind: SimulatorKind,
    /// Set by [`compare`](Self::compare).
    pub equivalent: Option<bool>,
}

impl<O: PartialEq + Debug> SimulationOutcome<O> {
    /// Records whether the per-node outputs equal the reference.
    pub fn compare(&mut self, reference: &SimulationOutcome<O>) -> bool {
        let same = self.outputs == reference.outputs;
        self.equivalent = Some(same);
        same
    }

    /// Both output vectors for every node where they differ.
    pub fn diff(&self, reference: &SimulationOutcome<O>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} vs {}", self.kind, reference.kind);
        if self.outputs.len() != reference.outputs.len() {
            let _ = writeln!(out, "length {} vs {}", self.outputs.len(), reference.outputs.len());
        }
        for (v, (a, b)) in self.outputs.iter().zip(&reference.outputs).enumerate() {
            if a != b {
                let _ = writeln!(out, "{v}: {a:?} != {b:?}");
            }
        }
        out
    }
}

/// Runs the algorithm, realizing the message delivery of each LOCAL round
/// with `deliver`, which must fill `state` with the round's payload knowledge
/// and return the GOSSIP rounds it used.
fn drive<A, F>(
    g: &Graph,
    alg: &A,
    tape_seed: u64,
    cap: usize,
    kind: SimulatorKind,
    mut deliver: F,
) -> Result<SimulationOutcome<A::Output>, SimulationError>
where
    A: LocalAlgorithm,
    F: FnMut(usize, &mut KnowledgeState) -> Result<usize, SimulationError>,
{
    let n = g.n();
    let neighbors: Vec<Vec<NodeId>> = (0..n).map(|u| g.neighbors(u).collect()).collect();
    let mut states: Vec<A::State> =
        (0..n).map(|u| alg.init(u, &neighbors[u], &Tape::new(tape_seed, u))).collect();
    let mut model_rounds = 0;
    let mut gossip_rounds = 0;
    loop {
        let live: Vec<bool> = states.iter().map(|s| !alg.halted(s)).collect();
        if !live.iter().any(|&l| l) {
            break;
        }
        if model_rounds >= cap {
            return Err(SimulationError::RoundCapExceeded { cap });
        }
        let messages: Vec<Option<A::Message>> =
            states.iter().zip(&live).map(|(s, &l)| l.then(|| alg.message(s))).collect();
        let knowledge = if kind == SimulatorKind::Reference {
            None
        } else {
            let mut k = KnowledgeState::with_own_payloads(n);
            gossip_rounds += deliver(model_rounds, &mut k)?;
            Some(k)
        };
        for u in (0..n).filter(|&u| live[u]) {
            let inbox: Vec<(NodeId, A::Message)> = neighbors[u]
                .iter()
                .filter(|&&w| knowledge.as_ref().is_none_or(|k| k.knows_payload(u, w)))
                .filter_map(|&w| messages[w].clone().map(|m| (w, m)))
                .collect();
            alg.round(&mut states[u], &inbox);
        }
        model_rounds += 1;
    }
    Ok(SimulationOutcome {
        outputs: states.iter().map(|s| alg.output(s)).collect(),
        model_rounds,
        gossip_rounds,
        kind,
        equivalent: None,
    })
}

/// The synchronous LOCAL reference execution.
pub fn run_local<A: LocalAlgorithm>(
    g: &Graph,
    alg: &A,
    tape_seed: u64,
    cap: usize,
) -> Result<SimulationOutcome<A::Output>, SimulationError> {
    drive(g, alg, tape_seed, cap, SimulatorKind::Reference, |_, _| Ok(0))
}

/// One Superstep invocation per LOCAL round.
pub fn simulate_superstep<A: LocalAlgorithm>(
    g: &Graph,
    alg: &A,
    tape_seed: u64,
    tau: usize,
    rng: &RandomSource,
    cap: usize,
) -> Result<SimulationOutcome<A::Output>, SimulationError> {
    let base = rng.derive(purpose::SIMULATION);
    drive(g, alg, tape_seed, cap, SimulatorKind::Superstep, |round, k| {
        Ok(superstep_with(g, SuperstepConfig::new(tau), &base.derive(round as u64), k)?.total_rounds)
    })
}

/// `Δ` GOSSIP rounds per LOCAL round; in round `k` every node contacts its
/// `k`-th neighbor.
pub fn simulate_round_robin<A: LocalAlgorithm>(
    g: &Graph,
    alg: &A,
    tape_seed: u64,
    cap: usize,
) -> Result<SimulationOutcome<A::Output>, SimulationError> {
    drive(g, alg, tape_seed, cap, SimulatorKind::RoundRobin, |_, k| round_robin_exchange(g, k))
}

fn round_robin_exchange(g: &Graph, k: &mut KnowledgeState) -> Result<usize, SimulationError> {
    let delta = g.max_degree();
    for i in 0..delta {
        let a = ActivationSet::new((0..g.n()).map(|u| g.neighbors(u).nth(i)).collect());
        k.apply_round(&symmetric_closure(&a)).map_err(ProtocolError::from)?;
    }
    Ok(delta)
}

/// Discovers a DirectExchange schedule once and replays it every LOCAL
/// round. Returns the outcome and the discovery cost (included in
/// `gossip_rounds`).
pub fn simulate_direct_exchange<A: LocalAlgorithm>(
    g: &Graph,
    alg: &A,
    tape_seed: u64,
    epsilon: f64,
    cap: usize,
) -> Result<SimulationOutcome<A::Output>, SimulationError> {
    let mut schedule: Option<ExchangeSchedule> = None;
    drive(g, alg, tape_seed, cap, SimulatorKind::DirectExchange, |_, k| {
        let mut spent = 0;
        if schedule.is_none() {
            let report = direct_exchange(g, epsilon)?;
            spent += report.rounds;
            schedule = Some(report.schedule);
        }
        let s = schedule.as_ref().expect("schedule discovered");
        execute_schedule(g, s, k)?;
        Ok(spent + s.rounds())
    })
}

/// Communicates only over the spanner `s`: each LOCAL round on `g` becomes
/// `α` flooding rounds on `s`, each realized by `inner`.
pub fn simulate_via_spanner<A: LocalAlgorithm>(
    g: &Graph,
    alg: &A,
    tape_seed: u64,
    s: &SpannerResult,
    inner: InnerSimulator,
    cap: usize,
) -> Result<SimulationOutcome<A::Output>, SimulationError> {
    let alpha = match s.certified_stretch {
        Some((a, b)) if b == 0.0 && a >= 1.0 && a.fract() == 0.0 => a as usize,
        Some((a, b)) => return Err(SimulationError::UncertifiedSpanner(format!("stretch ({a}, {b}) is not (α, 0)"))),
        None => return Err(SimulationError::UncertifiedSpanner("no certified stretch".into())),
    };
    let sub = &s.subgraph;
    let report = verify_stretch(g, sub, alpha as f64, 0.0, StretchMode::NeighborPairs)?;
    if !report.holds {
        let v = report.max_violation.expect("violation recorded");
        return Err(SimulationError::UncertifiedSpanner(format!(
            "pair ({}, {}) exceeds stretch {alpha}",
            v.u, v.v
        )));
    }
    let mut schedule: Option<ExchangeSchedule> = None;
    let inner_rng = match inner {
        InnerSimulator::Superstep { seed, .. } => RandomSource::new(seed).derive(purpose::SIMULATION),
        _ => RandomSource::new(0),
    };
    let mut calls = 0u64;
    drive(g, alg, tape_seed, cap, SimulatorKind::Spanner(inner), |_, k| {
        let mut spent = 0;
        for _ in 0..alpha {
            spent += match inner {
                InnerSimulator::DirectExchange { epsilon } => {
                    let mut discovery = 0;
                    if schedule.is_none() {
                        let r = direct_exchange(sub, epsilon)?;
                        discovery = r.rounds;
                        schedule = Some(r.schedule);
                    }
                    let sched = schedule.as_ref().expect("schedule discovered");
                    execute_schedule(sub, sched, k)?;
                    discovery + sched.rounds()
                }
                InnerSimulator::RoundRobin => round_robin_exchange(sub, k)?,
                InnerSimulator::Superstep { tau, .. } => {
                    calls += 1;
                    superstep_with(sub, SuperstepConfig::new(tau), &inner_rng.derive(calls), k)?.total_rounds
                }
            };
        }
        Ok(spent)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use crate::protocols::{default_tau, superstep, DEFAULT_TAU_CONSTANT};
    use crate::spanner::extract_spanner;

    #[test]
    fn flooding_reference() {
        let p5 = generate(&Family::Path(5)).unwrap();
        let r = run_local(&p5, &Flooding::new(&p5, 0), 0, 100).unwrap();
        assert_eq!(r.model_rounds, 4);
        assert_eq!(r.outputs, (0..5).map(Some).collect::<Vec<_>>());
        let k6 = generate(&Family::Clique(6)).unwrap();
        assert_eq!(run_local(&k6, &Flooding::new(&k6, 2), 0, 100).unwrap().model_rounds, 1);
        assert_eq!(run_local(&k6, &Silent, 0, 100).unwrap().model_rounds, 0);
    }

    #[test]
    fn round_cap() {
        let p5 = generate(&Family::Path(5)).unwrap();
        assert_eq!(
            run_local(&p5, &Flooding::new(&p5, 0), 0, 2).unwrap_err(),
            SimulationError::RoundCapExceeded { cap: 2 }
        );
    }

    #[test]
    fn simulators_match_on_path() {
        let p5 = generate(&Family::Path(5)).unwrap();
        let alg = Flooding::new(&p5, 0);
        let reference = run_local(&p5, &alg, 3, 100).unwrap();
        let tau = default_tau(p5.m(), DEFAULT_TAU_CONSTANT).unwrap();
        let mut ss = simulate_superstep(&p5, &alg, 3, tau, &RandomSource::new(1), 100).unwrap();
        assert!(ss.compare(&reference));
        assert_eq!(ss.gossip_rounds % (2 * tau), 0);
        let mut rr = simulate_round_robin(&p5, &alg, 3, 100).unwrap();
        assert!(rr.compare(&reference));
        assert_eq!(rr.gossip_rounds, 4 * 2);
        let mut dx = simulate_direct_exchange(&p5, &alg, 3, 0.5, 100).unwrap();
        assert!(dx.compare(&reference), "{}", dx.diff(&reference));
    }

    #[test]
    fn silent_costs_nothing() {
        let g = generate(&Family::Clique(5)).unwrap();
        let tau = default_tau(g.m(), DEFAULT_TAU_CONSTANT).unwrap();
        assert_eq!(simulate_superstep(&g, &Silent, 0, tau, &RandomSource::new(0), 10).unwrap().gossip_rounds, 0);
        assert_eq!(simulate_direct_exchange(&g, &Silent, 0, 0.5, 10).unwrap().gossip_rounds, 0);
    }

    #[test]
    fn k2_round_robin_one_round_per_local_round() {
        let k2 = generate(&Family::Path(2)).unwrap();
        let r = simulate_round_robin(&k2, &NeighborCollection, 0, 10).unwrap();
        assert_eq!((r.model_rounds, r.gossip_rounds), (1, 1));
    }

    #[test]
    fn spanner_composition() {
        let g = generate(&Family::Dumbbell(6)).unwrap();
        let tau = default_tau(g.m(), DEFAULT_TAU_CONSTANT).unwrap();
        let run = superstep(&g, tau, &RandomSource::new(2)).unwrap();
        let s = extract_spanner(&g, &run.executed_traces()).unwrap();
        let alg = Flooding::new(&g, 0);
        let reference = run_local(&g, &alg, 0, 100).unwrap();
        let mut out = simulate_via_spanner(&g, &alg, 0, &s, InnerSimulator::DirectExchange { epsilon: 0.5 }, 100).unwrap();
        assert!(out.compare(&reference));

        let identity = SpannerResult { subgraph: g.clone(), source_rounds: 1, certified_stretch: Some((1.0, 0.0)), density: 0 };
        let mut out = simulate_via_spanner(&g, &BfsLabeling::new(&g, 0), 4, &identity, InnerSimulator::RoundRobin, 100).unwrap();
        assert!(out.compare(&run_local(&g, &BfsLabeling::new(&g, 0), 4, 100).unwrap()));

        let no_bridge = Graph::from_edges(g.n(), g.edges().map(|(u, v, _)| (u, v)).filter(|&e| e != (5, 6))).unwrap();
        let broken = SpannerResult { subgraph: no_bridge, source_rounds: 1, certified_stretch: Some((3.0, 0.0)), density: 0 };
        assert!(matches!(
            simulate_via_spanner(&g, &alg, 0, &broken, InnerSimulator::RoundRobin, 100),
            Err(SimulationError::UncertifiedSpanner(_))
        ));
    }
}
