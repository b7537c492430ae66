//! Invariant battery behind `gossip verify`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use gossip_core::decompose::{cluster, verify_partition, xi_for_zeta};
use gossip_core::engine::{replay, run_process, KnowledgeState, RandomSource};
use gossip_core::graph::{generate, read_edge_list, ConductanceMode, DirectedEdgeSet, Family, Graph, VertexSet};
use gossip_core::protocols::{default_tau, superstep, DEFAULT_TAU_CONSTANT};
use gossip_core::simulate::{
    run_local, simulate_direct_exchange, simulate_round_robin, simulate_superstep, simulate_via_spanner, Flooding,
    InnerSimulator, DEFAULT_ROUND_CAP,
};
use gossip_core::spanner::{extract_spanner, verify_stretch, StretchMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(format!("unknown level `{s}` (expected quick or full)")),
        }
    }
}

impl Level {
    fn seeds(self) -> u64 {
        match self {
            Level::Quick => 3,
            Level::Full => 20,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Check {
    pub name: String,
    pub runs: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check { name: name.into(), ..Check::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.runs += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<14} {}/{} ok", self.name, self.runs - self.failures.len(), self.runs)?;
        for fail in self.failures.iter().take(5) {
            write!(f, "\n     {fail}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n     ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "verify {:?}: {} passed, {failed} failed", self.level, self.checks.len() - failed)
    }
}

fn builtin(level: Level) -> Vec<(String, Graph)> {
    let mut fams = vec![
        Family::Path(9),
        Family::Cycle(10),
        Family::Star { leaves: 8 },
        Family::Clique(8),
        Family::Dumbbell(4),
        Family::Grid { rows: 3, cols: 4 },
        Family::RandomTree { n: 14, seed: 1 },
        Family::ErdosRenyi { n: 12, p: 0.35, seed: 2 },
        Family::ErdosRenyi { n: 64, p: 0.1, seed: 3 },
        Family::Figure1 { n: 32, gadget: 0 },
    ];
    if level == Level::Full {
        fams.extend([
            Family::Clique(32),
            Family::Dumbbell(7),
            Family::Grid { rows: 10, cols: 10 },
            Family::TriangularGrid { rows: 6, cols: 6 },
            Family::ErdosRenyi { n: 14, p: 0.3, seed: 4 },
            Family::ErdosRenyi { n: 256, p: 0.03, seed: 5 },
            Family::Figure1 { n: 100, gadget: 3 },
        ]);
    }
    fams.into_iter().map(|f| (f.to_string(), generate(&f).expect("built-in family"))).collect()
}

/// Loads every regular file in `dir`, in name order.
fn load_corpus(dir: &Path, check: &mut Check) -> Vec<(String, Graph)> {
    let mut paths = match fs::read_dir(dir) {
        Ok(entries) => entries.filter_map(Result::ok).map(|e| e.path()).filter(|p| p.is_file()).collect::<Vec<_>>(),
        Err(e) => {
            check.record(false, || format!("{}: {e}", dir.display()));
            return Vec::new();
        }
    };
    paths.sort();
    let mut graphs = Vec::new();
    for p in paths {
        match read_edge_list(&p) {
            Ok(g) => {
                check.record(true, String::new);
                graphs.push((p.display().to_string(), g));
            }
            Err(e) => check.record(false, || format!("{}: {e}", p.display())),
        }
    }
    graphs
}

/// `u` knows `w`'s message after K ⟺ `w` knows `u`'s after K^rev.
fn reversal(graphs: &[(String, Graph)], seeds: u64) -> Check {
    let mut c = Check::new("reversal");
    for (name, g) in graphs {
        for seed in 0..seeds {
            let tau = 1 + (seed as usize * 7) % 20;
            let mut fwd = KnowledgeState::with_own_payloads(g.n());
            let Ok((trace, _)) = run_process(&DirectedEdgeSet::from_graph(g), tau, &RandomSource::new(seed), &mut fwd)
            else {
                c.record(false, || format!("{name} seed {seed}: process failed"));
                continue;
            };
            let mut rev = KnowledgeState::with_own_payloads(g.n());
            let ok = replay(g, &trace.reverse(), &mut rev).is_ok()
                && (0..g.n()).all(|u| (0..g.n()).all(|w| fwd.knows_payload(u, w) == rev.knows_payload(w, u)));
            c.record(ok, || format!("{name} seed {seed} tau {tau}"));
        }
    }
    c
}

fn superstep_checks(graphs: &[(String, Graph)], seeds: u64) -> (Check, Check) {
    let mut claims = Check::new("superstep");
    let mut lemma = Check::new("spanner-lemma");
    for (name, g) in graphs.iter().filter(|(_, g)| g.m() > 0 && g.is_unweighted()) {
        let tau = default_tau(g.m(), DEFAULT_TAU_CONSTANT).expect("m > 0");
        for seed in 0..seeds {
            let r = match superstep(g, tau, &RandomSource::new(seed)) {
                Ok(r) => r,
                Err(e) => {
                    claims.record(false, || format!("{name} seed {seed}: {e}"));
                    continue;
                }
            };
            claims.record(r.invariants_ok() && r.exchanged.len() == g.m(), || format!("{name} seed {seed}"));
            let t = r.total_rounds;
            let ok = match extract_spanner(g, &r.executed_traces()) {
                Ok(s) => {
                    s.density <= t
                        && verify_stretch(g, &s.subgraph, t as f64, 0.0, StretchMode::NeighborPairs)
                            .is_ok_and(|rep| rep.holds)
                }
                Err(_) => false,
            };
            lemma.record(ok, || format!("{name} seed {seed} T {t}"));
        }
    }
    (claims, lemma)
}

fn decomposition(graphs: &[(String, Graph)]) -> Check {
    let mut c = Check::new("decomposition");
    for (name, g) in graphs.iter().filter(|(_, g)| g.n() <= 14 && g.m() > 0) {
        for zeta in [1.0 / 6.0, 1.0 / 3.0] {
            let ok = xi_for_zeta(g, zeta)
                .and_then(|xi| cluster(g, &VertexSet::all(g.n()), xi, ConductanceMode::Exact))
                .is_ok_and(|p| verify_partition(g, &p, zeta).passed());
            c.record(ok, || format!("{name} zeta {zeta:.3}"));
        }
    }
    c
}

fn equivalence(graphs: &[(String, Graph)], seeds: u64) -> Check {
    let mut c = Check::new("simulators");
    for (name, g) in graphs.iter().filter(|(_, g)| g.m() > 0 && g.is_unweighted() && g.n() <= 64) {
        let alg = Flooding::new(g, 0);
        let tau = default_tau(g.m(), DEFAULT_TAU_CONSTANT).expect("m > 0");
        for seed in 0..seeds.min(3) {
            let Ok(reference) = run_local(g, &alg, seed, DEFAULT_ROUND_CAP) else {
                c.record(false, || format!("{name} seed {seed}: reference failed"));
                continue;
            };
            let rng = RandomSource::new(seed);
            let spanner = superstep(g, tau, &rng).ok().and_then(|r| extract_spanner(g, &r.executed_traces()).ok());
            let runs = [
                ("superstep", simulate_superstep(g, &alg, seed, tau, &rng, DEFAULT_ROUND_CAP)),
                ("round-robin", simulate_round_robin(g, &alg, seed, DEFAULT_ROUND_CAP)),
                ("direct-exchange", simulate_direct_exchange(g, &alg, seed, 0.5, DEFAULT_ROUND_CAP)),
            ];
            for (sim, out) in runs {
                c.record(out.is_ok_and(|o| o.outputs == reference.outputs), || format!("{name} seed {seed} {sim}"));
            }
            let ok = spanner.is_some_and(|s| {
                simulate_via_spanner(g, &alg, seed, &s, InnerSimulator::RoundRobin, DEFAULT_ROUND_CAP)
                    .is_ok_and(|o| o.outputs == reference.outputs)
            });
            c.record(ok, || format!("{name} seed {seed} spanner"));
        }
    }
    c
}

pub fn verify_suite(level: Level, corpus: Option<&Path>) -> VerifyReport {
    let mut graphs = builtin(level);
    let mut checks = Vec::new();
    if let Some(dir) = corpus {
        let mut load = Check::new("load");
        graphs.extend(load_corpus(dir, &mut load));
        checks.push(load);
    }
    let seeds = level.seeds();
    checks.push(reversal(&graphs, seeds));
    let (claims, lemma) = superstep_checks(&graphs, seeds);
    checks.push(claims);
    checks.push(decomposition(&graphs));
    checks.push(lemma);
    checks.push(equivalence(&graphs, seeds));
    VerifyReport { level, checks }
}
