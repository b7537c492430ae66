//! Deterministic graph families used by tests and experiments.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Empty(usize),
    Path(usize),
    Cycle(usize),
    /// Center `0` joined to `leaves` leaves.
    Star { leaves: usize },
    Clique(usize),
    /// Two `K_k` joined by a single bridge `(k−1, k)`.
    Dumbbell(usize),
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    /// Hubs `v = 0` and `w = 1`, a layer of `⌈log₂ n⌉` connector nodes and a
    /// layer of `n` nodes, every layer node adjacent to both hubs. With
    /// `gadget > 0`, each node of the `n`-layer additionally owns a private
    /// clique of `gadget` nodes, all adjacent to it.
    Figure1 { n: usize, gadget: usize },
    Grid { rows: usize, cols: usize },
    /// Grid plus one diagonal per cell (planar, density just under 3).
    TriangularGrid { rows: usize, cols: usize },
    /// Uniform random recursive tree.
    RandomTree { n: usize, seed: u64 },
    DisjointCliques { count: usize, size: usize },
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidParams(msg.into())
}

fn clique_edges(nodes: &[NodeId], out: &mut Vec<(NodeId, NodeId)>) {
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            out.push((a, b));
        }
    }
}

/// Convenience: `⌈log₂ n⌉` for `n ≥ 1`.
pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

pub fn generate(family: &Family) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    let n = match *family {
        Family::Empty(n) => n,
        Family::Path(n) => {
            if n == 0 {
                return Err(invalid("path needs at least one node"));
            }
            edges.extend((1..n).map(|i| (i - 1, i)));
            n
        }
        Family::Cycle(n) => {
            if n < 3 {
                return Err(invalid("cycle needs at least three nodes"));
            }
            edges.extend((0..n).map(|i| (i, (i + 1) % n)));
            n
        }
        Family::Star { leaves } => {
            if leaves == 0 {
                return Err(invalid("star needs at least one leaf"));
            }
            edges.extend((1..=leaves).map(|i| (0, i)));
            leaves + 1
        }
        Family::Clique(n) => {
            if n == 0 {
                return Err(invalid("clique needs at least one node"));
            }
            clique_edges(&(0..n).collect::<Vec<_>>(), &mut edges);
            n
        }
        Family::Dumbbell(k) => {
            if k == 0 {
                return Err(invalid("dumbbell needs clique size at least one"));
            }
            clique_edges(&(0..k).collect::<Vec<_>>(), &mut edges);
            clique_edges(&(k..2 * k).collect::<Vec<_>>(), &mut edges);
            edges.push((k - 1, k));
            2 * k
        }
        Family::ErdosRenyi { n, p, seed } => {
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("erdos_renyi needs n ≥ 1 and p in [0,1], got n={n} p={p}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            n
        }
        Family::Figure1 { n, gadget } => {
            if n < 2 {
                return Err(invalid("figure1 needs n ≥ 2"));
            }
            let z = ceil_log2(n);
            let layer_start = 2 + z;
            let mut next = layer_start + n;
            for x in 2..layer_start + n {
                edges.push((0, x));
                edges.push((1, x));
            }
            for u in layer_start..layer_start + n {
                let members: Vec<NodeId> = (next..next + gadget).collect();
                clique_edges(&members, &mut edges);
                edges.extend(members.iter().map(|&c| (u, c)));
                next += gadget;
            }
            next
        }
        Family::Grid { rows, cols } | Family::TriangularGrid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(invalid("grid needs positive dimensions"));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let diagonal = matches!(family, Family::TriangularGrid { .. });
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                    if diagonal && r + 1 < rows && c + 1 < cols {
                        edges.push((id(r, c), id(r + 1, c + 1)));
                    }
                }
            }
            rows * cols
        }
        Family::RandomTree { n, seed } => {
            if n == 0 {
                return Err(invalid("tree needs at least one node"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            edges.extend((1..n).map(|i| (rng.gen_range(0..i), i)));
            n
        }
        Family::DisjointCliques { count, size } => {
            if size == 0 {
                return Err(invalid("clique size must be positive"));
            }
            for c in 0..count {
                clique_edges(&(c * size..(c + 1) * size).collect::<Vec<_>>(), &mut edges);
            }
            count * size
        }
    };
    Graph::from_edges(n, edges)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Empty(n) => write!(f, "empty:{n}"),
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Star { leaves } => write!(f, "star:{leaves}"),
            Family::Clique(n) => write!(f, "clique:{n}"),
            Family::Dumbbell(k) => write!(f, "dumbbell:{k}"),
            Family::ErdosRenyi { n, p, seed } => write!(f, "er:{n}:{p}:{seed}"),
            Family::Figure1 { n, gadget: 0 } => write!(f, "figure1:{n}"),
            Family::Figure1 { n, gadget } => write!(f, "figure1:{n}:{gadget}"),
            Family::Grid { rows, cols } => write!(f, "grid:{rows}:{cols}"),
            Family::TriangularGrid { rows, cols } => write!(f, "trigrid:{rows}:{cols}"),
            Family::RandomTree { n, seed } => write!(f, "tree:{n}:{seed}"),
            Family::DisjointCliques { count, size } => write!(f, "cliques:{count}:{size}"),
        }
    }
}

impl FromStr for Family {
    type Err = GraphError;

    /// Parses the `name:arg:...` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let name = parts[0];
        let args = &parts[1..];
        let usize_at = |i: usize| -> Result<usize, GraphError> {
            args.get(i)
                .ok_or_else(|| invalid(format!("{name}: missing argument {}", i + 1)))?
                .parse()
                .map_err(|_| invalid(format!("{name}: argument {} is not an integer", i + 1)))
        };
        let expect = |k: usize| -> Result<(), GraphError> {
            if args.len() == k {
                Ok(())
            } else {
                Err(invalid(format!("{name}: expected {k} arguments, got {}", args.len())))
            }
        };
        let family = match name {
            "empty" => {
                expect(1)?;
                Family::Empty(usize_at(0)?)
            }
            "path" => {
                expect(1)?;
                Family::Path(usize_at(0)?)
            }
            "cycle" => {
                expect(1)?;
                Family::Cycle(usize_at(0)?)
            }
            "star" => {
                expect(1)?;
                Family::Star { leaves: usize_at(0)? }
            }
            "clique" => {
                expect(1)?;
                Family::Clique(usize_at(0)?)
            }
            "dumbbell" => {
                expect(1)?;
                Family::Dumbbell(usize_at(0)?)
            }
            "er" | "erdos_renyi" => {
                expect(3)?;
                let p = args[1].parse().map_err(|_| invalid("er: p is not a number"))?;
                let seed = args[2].parse().map_err(|_| invalid("er: seed is not an integer"))?;
                Family::ErdosRenyi { n: usize_at(0)?, p, seed }
            }
            "figure1" => {
                if args.len() == 1 {
                    Family::Figure1 { n: usize_at(0)?, gadget: 0 }
                } else {
                    expect(2)?;
                    Family::Figure1 { n: usize_at(0)?, gadget: usize_at(1)? }
                }
            }
            "grid" => {
                expect(2)?;
                Family::Grid { rows: usize_at(0)?, cols: usize_at(1)? }
            }
            "trigrid" => {
                expect(2)?;
                Family::TriangularGrid { rows: usize_at(0)?, cols: usize_at(1)? }
            }
            "tree" => {
                expect(2)?;
                let seed = args[1].parse().map_err(|_| invalid("tree: seed is not an integer"))?;
                Family::RandomTree { n: usize_at(0)?, seed }
            }
            "cliques" => {
                expect(2)?;
                Family::DisjointCliques { count: usize_at(0)?, size: usize_at(1)? }
            }
            other => return Err(invalid(format!("unknown graph family `{other}`"))),
        };
        Ok(family)
    }
}
