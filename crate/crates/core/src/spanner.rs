//! Spanners read off gossip traces.
//!
//! A NeighborExchange run of `T` rounds only ever talks over the edges it
//! activates. Those edges form a `(T, 0)`-stretch spanner, and since each node
//! initiates one edge per round they can be oriented with out-degree at most
//! `T`, so the hereditary density is at most `T` as well.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::engine::{replay, symmetric_closure, EngineError, KnowledgeState, ProcessTrace};
use crate::graph::{hereditary_density, write_edge_list, Graph, GraphError, NodeId};
use crate::protocols::neighbor_exchange_complete;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpannerError {
    #[error("the producing run did not complete neighbor exchange")]
    IncompleteRun,
    #[error("edge {{{0},{1}}} is not an edge of the host graph")]
    NotSubgraph(NodeId, NodeId),
    #[error("stretch must be finite and non-negative")]
    InvalidStretch,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug)]
pub struct SpannerResult {
    pub subgraph: Graph,
    /// Rounds of the producing run.
    pub source_rounds: usize,
    /// `(α, β)` if the stretch has been verified on the host graph.
    pub certified_stretch: Option<(f64, f64)>,
    pub density: usize,
}

/// Union of all activated edges across `traces`, which must be the rounds of
/// a completed NeighborExchange run in execution order.
pub fn extract_spanner(g: &Graph, traces: &[ProcessTrace]) -> Result<SpannerResult, SpannerError> {
    let mut state = KnowledgeState::with_own_payloads(g.n());
    let mut edges = BTreeSet::new();
    let mut rounds = 0;
    for t in traces {
        replay(g, t, &mut state)?;
        rounds += t.len();
        for a in t.rounds() {
            edges.extend(symmetric_closure(a).iter().filter(|&(u, w)| u < w));
        }
    }
    if !neighbor_exchange_complete(g, &state) {
        return Err(SpannerError::IncompleteRun);
    }
    let subgraph = Graph::from_edges(g.n(), edges)?;
    let density = hereditary_density(&subgraph)?;
    let stretch = verify_stretch(g, &subgraph, rounds as f64, 0.0, StretchMode::NeighborPairs)?;
    let certified_stretch = stretch.holds.then_some((rounds as f64, 0.0));
    Ok(SpannerResult { subgraph, source_rounds: rounds, certified_stretch, density })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StretchMode {
    #[default]
    AllPairs,
    /// Only pairs at host distance 1; enough for `(α, 0)` stretch.
    NeighborPairs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StretchViolation {
    pub u: NodeId,
    pub v: NodeId,
    pub host_distance: usize,
    /// `None` if disconnected in the spanner.
    pub spanner_distance: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StretchReport {
    pub holds: bool,
    /// The pair exceeding the allowance by the most, if any.
    pub max_violation: Option<StretchViolation>,
    pub pairs_checked: usize,
}

fn check_subgraph(g: &Graph, s: &Graph) -> Result<(), SpannerError> {
    if s.n() != g.n() {
        return Err(SpannerError::Graph(GraphError::UniverseMismatch { set: s.n(), graph: g.n() }));
    }
    match s.edges().find(|&(u, v, _)| !g.has_edge(u, v)) {
        Some((u, v, _)) => Err(SpannerError::NotSubgraph(u, v)),
        None => Ok(()),
    }
}

/// `dist_S(u, v) ≤ α · dist_G(u, v) + β` for every pair connected in `g`.
pub fn verify_stretch(
    g: &Graph,
    s: &Graph,
    alpha: f64,
    beta: f64,
    mode: StretchMode,
) -> Result<StretchReport, SpannerError> {
    if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0) {
        return Err(SpannerError::InvalidStretch);
    }
    check_subgraph(g, s)?;
    let mut report = StretchReport { holds: true, max_violation: None, pairs_checked: 0 };
    let mut worst = 0.0f64;
    let mut consider = |u: NodeId, v: NodeId, dg: usize, ds: Option<usize>, report: &mut StretchReport| {
        report.pairs_checked += 1;
        let allowed = alpha * dg as f64 + beta;
        let excess = ds.map_or(f64::INFINITY, |d| d as f64 - allowed);
        if excess > 1e-9 && (report.max_violation.is_none() || excess > worst) {
            worst = excess;
            report.holds = false;
            report.max_violation = Some(StretchViolation { u, v, host_distance: dg, spanner_distance: ds });
        }
    };
    for u in 0..g.n() {
        let ds = s.bfs_distances(u);
        match mode {
            StretchMode::AllPairs => {
                let dg = g.bfs_distances(u);
                for v in u + 1..g.n() {
                    if let Some(d) = dg[v] {
                        consider(u, v, d, ds[v], &mut report);
                    }
                }
            }
            StretchMode::NeighborPairs => {
                for v in g.neighbors(u).filter(|&v| v > u) {
                    consider(u, v, 1, ds[v], &mut report);
                }
            }
        }
    }
    Ok(report)
}

pub fn spanner_density(s: &Graph) -> Result<usize, SpannerError> {
    Ok(hereditary_density(s)?)
}

/// Edge-list text with a header recording `T`, the stretch and the density.
pub fn write_spanner(s: &SpannerResult) -> String {
    let (alpha, beta) = s.certified_stretch.map_or(("uncertified".to_string(), "uncertified".to_string()), |(a, b)| {
        (a.to_string(), b.to_string())
    });
    let header = [
        format!("T={}", s.source_rounds),
        format!("alpha={alpha}"),
        format!("beta={beta}"),
        format!("density={}", s.density),
    ];
    write_edge_list(&s.subgraph, &header)
}
