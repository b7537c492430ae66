//! Executes an experiment matrix and emits one CSV row per run.

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use gossip_core::engine::{write_traces, KnowledgeState, ProcessTrace, RandomSource};
use gossip_core::graph::{hereditary_density, Graph};
use gossip_core::protocols::{
    default_tau, direct_exchange, execute_schedule, greedy_unheard_baseline, neighbor_exchange_complete,
    rumor_by_superstep, superstep, uniform_broadcast, ProtocolError, SuperstepReport,
};
use gossip_core::simulate::{
    run_local, simulate_direct_exchange, simulate_round_robin, simulate_superstep, simulate_via_spanner, BfsLabeling,
    Flooding, InnerSimulator, LocalAlgorithm, NeighborCollection, SimulationError, SimulationOutcome,
};
use gossip_core::spanner::extract_spanner;

use crate::config::{Algorithm, ExperimentConfig};
use crate::CliError;

pub const HEADER: [&str; 12] =
    ["protocol", "graph", "n", "m", "seed", "tau", "epsilon", "rounds", "iterations", "messages", "completed", "invariants_ok"];

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub config: usize,
    pub protocol: String,
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub tau: Option<usize>,
    pub epsilon: Option<f64>,
    pub rounds: usize,
    pub iterations: Option<usize>,
    pub messages: Option<usize>,
    pub completed: bool,
    pub invariants_ok: bool,
    /// Error or mismatch detail, reported on stderr only.
    pub note: Option<String>,
}

impl Row {
    fn fields(&self) -> [String; 12] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.protocol.clone(),
            self.graph.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.seed.to_string(),
            opt(self.tau.map(|t| t.to_string())),
            opt(self.epsilon.map(|e| e.to_string())),
            self.rounds.to_string(),
            opt(self.iterations.map(|i| i.to_string())),
            opt(self.messages.map(|m| m.to_string())),
            self.completed.to_string(),
            self.invariants_ok.to_string(),
        ]
    }
}

pub struct RunSummary {
    pub rows: Vec<Row>,
}

impl RunSummary {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.invariants_ok).count()
    }
}

/// Partial result of one protocol run.
#[derive(Default)]
struct Outcome {
    tau: Option<usize>,
    epsilon: Option<f64>,
    rounds: usize,
    iterations: Option<usize>,
    messages: Option<usize>,
    completed: bool,
    invariants_ok: bool,
    note: Option<String>,
    traces: Vec<ProcessTrace>,
}

impl Outcome {
    fn failed(note: impl ToString) -> Self {
        Outcome { invariants_ok: true, note: Some(note.to_string()), ..Outcome::default() }
    }
}

struct Job<'a> {
    cfg: &'a ExperimentConfig,
    g: &'a Graph,
    protocol: &'a str,
    seed: u64,
}

impl Job<'_> {
    fn tau_for(&self, g: &Graph) -> Result<usize, ProtocolError> {
        match self.cfg.tau {
            Some(t) => Ok(t),
            None => default_tau(g.m(), self.cfg.tau_constant),
        }
    }

    fn run(&self) -> Outcome {
        let rng = RandomSource::new(self.seed);
        match self.protocol {
            "superstep" => self.superstep(&rng),
            "rumor" => self.rumor(&rng),
            "direct-exchange" => self.direct_exchange(),
            "baseline" => match greedy_unheard_baseline(self.g, &rng, self.cfg.round_cap) {
                Ok(r) => Outcome {
                    rounds: r.rounds,
                    messages: Some(r.stats.connections),
                    completed: r.completed,
                    invariants_ok: true,
                    ..Outcome::default()
                },
                Err(e) => Outcome::failed(e),
            },
            "uniform-broadcast" => {
                if self.cfg.source >= self.g.n() {
                    return Outcome::failed(format!("source {} out of range", self.cfg.source));
                }
                match uniform_broadcast(self.g, self.cfg.source, self.cfg.round_cap, &rng) {
                    Ok(r) => Outcome {
                        rounds: r.unwrap_or(self.cfg.round_cap),
                        completed: r.is_some(),
                        invariants_ok: true,
                        ..Outcome::default()
                    },
                    Err(e) => Outcome::failed(e),
                }
            }
            sim => {
                if self.cfg.source >= self.g.n() {
                    return Outcome::failed(format!("source {} out of range", self.cfg.source));
                }
                match self.cfg.algorithm {
                    Algorithm::Flooding => self.simulate(sim, &Flooding::new(self.g, self.cfg.source)),
                    Algorithm::Bfs => self.simulate(sim, &BfsLabeling::new(self.g, self.cfg.source)),
                    Algorithm::Neighbors => self.simulate(sim, &NeighborCollection),
                }
            }
        }
    }

    fn superstep(&self, rng: &RandomSource) -> Outcome {
        let tau = match self.tau_for(self.g) {
            Ok(t) => t,
            Err(e) => return Outcome::failed(e),
        };
        let mut out = Outcome { tau: Some(tau), invariants_ok: true, ..Outcome::default() };
        match superstep(self.g, tau, rng) {
            Ok(r) => {
                out.rounds = r.total_rounds;
                out.iterations = Some(r.iterations);
                out.messages = Some(r.stats.connections);
                out.completed = r.completed;
                out.invariants_ok = r.invariants_ok() && r.exchanged.len() == self.g.m();
                out.traces = r.executed_traces();
            }
            Err(ProtocolError::IterationCapExceeded { cap, remaining }) => {
                out.rounds = 2 * tau * cap;
                out.iterations = Some(cap);
                out.note = Some(format!("{remaining} directed edges left after {cap} iterations"));
            }
            Err(e) => out.note = Some(e.to_string()),
        }
        out
    }

    fn rumor(&self, rng: &RandomSource) -> Outcome {
        let tau = match self.tau_for(self.g) {
            Ok(t) => t,
            Err(e) => return Outcome::failed(e),
        };
        match rumor_by_superstep(self.g, tau, rng) {
            Ok(r) => Outcome {
                tau: Some(tau),
                rounds: r.total_rounds,
                iterations: Some(r.invocations),
                completed: r.completed,
                invariants_ok: r.invariants_ok && (!r.completed || r.within_diameter()),
                ..Outcome::default()
            },
            Err(e) => Outcome { tau: Some(tau), ..Outcome::failed(e) },
        }
    }

    fn direct_exchange(&self) -> Outcome {
        let eps = self.cfg.epsilon;
        let mut out = Outcome { epsilon: Some(eps), invariants_ok: true, ..Outcome::default() };
        let r = match direct_exchange(self.g, eps) {
            Ok(r) => r,
            Err(e) => {
                out.note = Some(e.to_string());
                return out;
            }
        };
        out.rounds = r.rounds;
        out.iterations = Some(r.phases);
        let mut state = KnowledgeState::with_own_payloads(self.g.n());
        match execute_schedule(self.g, &r.schedule, &mut state) {
            Ok(stats) => {
                out.messages = Some(stats.connections);
                out.completed = neighbor_exchange_complete(self.g, &state);
            }
            Err(e) => out.note = Some(e.to_string()),
        }
        let delta = hereditary_density(self.g).map_or(f64::INFINITY, |d| d as f64);
        let within = r.max_initiations() as f64 <= 2.0 * (1.0 + eps) * (1.0 + eps) * delta;
        out.invariants_ok = out.completed && within;
        if !within {
            out.note = Some(format!("{} initiations exceed the δ = {delta} bound", r.max_initiations()));
        }
        let mut trace = ProcessTrace::new(self.g.n());
        for k in 0..r.schedule.rounds() {
            trace.push(r.schedule.activation(k));
        }
        out.traces = vec![trace];
        out
    }

    fn simulate<A: LocalAlgorithm>(&self, sim: &str, alg: &A) -> Outcome {
        let (g, seed, cap, eps) = (self.g, self.seed, self.cfg.round_cap, self.cfg.epsilon);
        let reference = match run_local(g, alg, seed, cap) {
            Ok(r) => r,
            Err(e) => return Outcome::failed(e),
        };
        let mut out = Outcome::default();
        let result: Result<SimulationOutcome<A::Output>, SimulationError> = match sim {
            "sim-superstep" => match self.tau_for(g) {
                Ok(tau) => {
                    out.tau = Some(tau);
                    simulate_superstep(g, alg, seed, tau, &RandomSource::new(seed), cap)
                }
                Err(e) => Err(e.into()),
            },
            "sim-round-robin" => simulate_round_robin(g, alg, seed, cap),
            "sim-direct-exchange" => {
                out.epsilon = Some(eps);
                simulate_direct_exchange(g, alg, seed, eps, cap)
            }
            spanner => self.via_spanner(spanner, alg, &mut out),
        };
        match result {
            Ok(mut o) => {
                out.rounds += o.gossip_rounds;
                out.iterations = Some(o.model_rounds);
                out.completed = true;
                out.invariants_ok = o.compare(&reference);
                if !out.invariants_ok {
                    out.note = Some(o.diff(&reference));
                }
            }
            Err(e) => {
                out.invariants_ok = !matches!(e, SimulationError::UncertifiedSpanner(_) | SimulationError::Spanner(_));
                out.note = Some(e.to_string());
            }
        }
        out
    }

    /// The spanner comes from a Superstep run on `g` with the same seed; its
    /// rounds are charged to the row.
    fn via_spanner<A: LocalAlgorithm>(
        &self,
        sim: &str,
        alg: &A,
        out: &mut Outcome,
    ) -> Result<SimulationOutcome<A::Output>, SimulationError> {
        let rng = RandomSource::new(self.seed);
        let tau = self.tau_for(self.g)?;
        let report: SuperstepReport = superstep(self.g, tau, &rng)?;
        let traces = report.executed_traces();
        let s = extract_spanner(self.g, &traces)?;
        out.rounds = report.total_rounds;
        out.traces = traces;
        let inner = match sim {
            "sim-spanner-round-robin" => InnerSimulator::RoundRobin,
            "sim-spanner-direct-exchange" => {
                out.epsilon = Some(self.cfg.epsilon);
                InnerSimulator::DirectExchange { epsilon: self.cfg.epsilon }
            }
            _ => {
                let inner_tau = self.tau_for(&s.subgraph)?;
                out.tau = Some(inner_tau);
                InnerSimulator::Superstep { tau: inner_tau, seed: self.seed }
            }
        };
        out.tau.get_or_insert(tau);
        simulate_via_spanner(self.g, alg, self.seed, &s, inner, self.cfg.round_cap)
    }
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

/// Runs every (graph, protocol, seed) triple. Config index enumerates graphs
/// in order, protocols within a graph.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let mut graphs = Vec::with_capacity(cfg.graphs.len());
    for spec in &cfg.graphs {
        let g = spec.load().map_err(|e| CliError::Load(format!("{}: {e}", spec.label())))?;
        graphs.push(g);
    }
    if let Some(dir) = &cfg.trace_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut tasks = Vec::new();
    for (gi, _) in graphs.iter().enumerate() {
        for (pi, _) in cfg.protocols.iter().enumerate() {
            let ci = gi * cfg.protocols.len() + pi;
            for &seed in &cfg.seeds {
                tasks.push((ci, gi, pi, seed));
            }
        }
    }
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(tasks.len()));
    let io_error = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..cfg.threads.min(tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(ci, gi, pi, seed)) = tasks.get(i) else { break };
                let g = &graphs[gi];
                let protocol = &cfg.protocols[pi];
                let out = Job { cfg, g, protocol, seed }.run();
                if let Some(dir) = &cfg.trace_dir {
                    let stem = format!("{ci:03}-{}-{}-{seed}", slug(protocol), slug(&cfg.graphs[gi].label()));
                    let mut dumps = Vec::new();
                    if !out.traces.is_empty() {
                        dumps.push((dir.join(format!("{stem}.trace")), write_traces(&out.traces)));
                    }
                    if let (false, Some(note)) = (out.invariants_ok, &out.note) {
                        dumps.push((dir.join(format!("{stem}.diff")), note.clone()));
                    }
                    for (path, text) in dumps {
                        if let Err(e) = fs::write(&path, text) {
                            io_error.lock().unwrap().get_or_insert(format!("{}: {e}", path.display()));
                        }
                    }
                }
                let row = Row {
                    config: ci,
                    protocol: protocol.clone(),
                    graph: cfg.graphs[gi].label(),
                    n: g.n(),
                    m: g.m(),
                    seed,
                    tau: out.tau,
                    epsilon: out.epsilon,
                    rounds: out.rounds,
                    iterations: out.iterations,
                    messages: out.messages,
                    completed: out.completed,
                    invariants_ok: out.invariants_ok,
                    note: out.note,
                };
                rows.lock().unwrap().push((i, row));
            });
        }
    });
    if let Some(e) = io_error.into_inner().unwrap() {
        return Err(CliError::Io(e));
    }
    let mut rows = rows.into_inner().unwrap();
    rows.sort_by_key(|(i, r)| (r.config, r.seed, *i));
    Ok(RunSummary { rows: rows.into_iter().map(|(_, r)| r).collect() })
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()
}

/// Writes the CSV to `path` or stdout.
pub fn emit(rows: &[Row], path: Option<&Path>) -> Result<(), CliError> {
    let result = match path {
        Some(p) => fs::File::create(p).and_then(|f| write_csv(rows, io::BufWriter::new(f))),
        None => write_csv(rows, io::stdout().lock()),
    };
    result.map_err(|e| CliError::Io(e.to_string()))
}
