#![allow(dead_code)]

use gossip_core::engine::ProcessTrace;
use gossip_core::graph::{generate, Family, Graph};

pub struct Named {
    pub name: String,
    pub graph: Graph,
}

fn named(f: Family) -> Named {
    Named { name: f.to_string(), graph: generate(&f).unwrap() }
}

/// The shared graph corpus: small and medium instances of every family.
pub fn corpus() -> Vec<Named> {
    let mut fams = Vec::new();
    for n in [2, 5, 12, 64, 200] {
        fams.push(Family::Path(n));
    }
    for n in [6, 13, 128] {
        fams.push(Family::Cycle(n));
    }
    for leaves in [5, 11, 32, 128] {
        fams.push(Family::Star { leaves });
    }
    for n in [3, 4, 8, 16, 32, 64] {
        fams.push(Family::Clique(n));
    }
    for k in [3, 4, 6, 7, 16] {
        fams.push(Family::Dumbbell(k));
    }
    for (rows, cols) in [(3, 3), (3, 4), (8, 8), (16, 16)] {
        fams.push(Family::Grid { rows, cols });
    }
    for (rows, cols) in [(3, 4), (10, 10)] {
        fams.push(Family::TriangularGrid { rows, cols });
    }
    for (n, seed) in [(10, 1), (14, 2), (50, 3), (200, 4)] {
        fams.push(Family::RandomTree { n, seed });
    }
    fams.push(Family::DisjointCliques { count: 2, size: 4 });
    fams.push(Family::DisjointCliques { count: 3, size: 5 });
    for (n, p, seed) in [
        (10, 0.4, 1),
        (12, 0.3, 2),
        (14, 0.25, 3),
        (16, 0.3, 4),
        (32, 0.2, 5),
        (64, 0.1, 6),
        (64, 0.3, 7),
        (128, 0.05, 8),
        (128, 0.2, 9),
        (256, 0.03, 10),
        (256, 0.1, 11),
        (512, 0.01, 12),
        (512, 0.02, 13),
    ] {
        fams.push(Family::ErdosRenyi { n, p, seed });
    }
    for n in [64, 100, 200] {
        fams.push(Family::Figure1 { n, gadget: 0 });
    }
    for n in [100, 200] {
        fams.push(Family::Figure1 { n, gadget: 3 });
    }
    fams.into_iter().map(named).collect()
}

/// Independent reachability oracle: `k[u]` is the bitset of origins whose
/// message `u` holds after the traces, starting from own messages only.
pub struct Reach {
    pub n: usize,
    k: Vec<Vec<u64>>,
}

impl Reach {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut k = vec![vec![0u64; words]; n];
        for (u, row) in k.iter_mut().enumerate() {
            row[u / 64] |= 1 << (u % 64);
        }
        Reach { n, k }
    }

    pub fn run(&mut self, trace: &ProcessTrace) {
        for a in trace.rounds() {
            let old = self.k.clone();
            for (u, w) in a.edges() {
                for (dst, src) in self.k[u].iter_mut().zip(&old[w]) {
                    *dst |= src;
                }
                for (dst, src) in self.k[w].iter_mut().zip(&old[u]) {
                    *dst |= src;
                }
            }
        }
    }

    pub fn knows(&self, u: usize, origin: usize) -> bool {
        self.k[u][origin / 64] >> (origin % 64) & 1 == 1
    }
}

/// BFS distances computed from the edge list alone.
pub fn oracle_distances(n: usize, edges: &[(usize, usize)], source: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![None; n];
    dist[source] = Some(0);
    let mut frontier = vec![source];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for u in frontier {
            for &v in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Brute-force `min φ(S, H−S)` over bipartitions of `h` with both sides of
/// positive ambient volume; `None` when no such bipartition exists.
pub fn oracle_conductance(g: &Graph, h: &[usize]) -> Option<f64> {
    let k = h.len();
    if k < 2 {
        return None;
    }
    let vol = |v: usize| g.node_volume(v);
    let mut best: Option<f64> = None;
    for mask in 1u32..(1 << k) - 1 {
        let (mut vs, mut vt, mut cut) = (0.0, 0.0, 0.0);
        for i in 0..k {
            if mask >> i & 1 == 1 {
                vs += vol(h[i]);
                for j in 0..k {
                    if mask >> j & 1 == 0 {
                        cut += g.weight(h[i], h[j]);
                    }
                }
            } else {
                vt += vol(h[i]);
            }
        }
        let denom = f64::min(vs, vt);
        if denom > 0.0 {
            let phi = cut / denom;
            best = Some(best.map_or(phi, |b: f64| b.min(phi)));
        }
    }
    best
}
