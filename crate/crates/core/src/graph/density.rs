//! Hereditary density (pseudoarboricity) via bounded-outdegree orientations.
//!
//! A graph has at most `d·|S|` edges on every induced subgraph exactly when its
//! edges can be oriented with out-degree at most `d` everywhere. Feasibility of
//! such an orientation is a bipartite flow problem: source to each edge
//! (capacity 1), edge to both endpoints, each vertex to sink (capacity `d`).

use std::collections::VecDeque;

use super::{Graph, GraphError};

struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<u32>,
    next: Vec<usize>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![NIL; nodes],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            level: vec![0; nodes],
            cursor: vec![NIL; nodes],
        }
    }

    fn add_arc(&mut self, a: usize, b: usize, c: u32) {
        for (x, y, cc) in [(a, b, c), (b, a, 0)] {
            self.to.push(y);
            self.cap.push(cc);
            self.next.push(self.head[x]);
            self.head[x] = self.to.len() - 1;
        }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let mut e = self.head[u];
            while e != NIL {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
                e = self.next[e];
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: u32) -> u32 {
        if u == t {
            return pushed;
        }
        while self.cursor[u] != NIL {
            let e = self.cursor[u];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[e]));
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.cursor[u] = self.next[e];
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.cursor.clone_from(&self.head);
            loop {
                let f = self.dfs(s, t, u32::MAX);
                if f == 0 {
                    break;
                }
                flow += f as u64;
            }
        }
        flow
    }
}

/// Whether the edges of `g` admit an orientation with every out-degree `≤ bound`.
pub fn orientation_feasible(g: &Graph, bound: usize) -> bool {
    let m = g.m();
    if m == 0 {
        return true;
    }
    let n = g.n();
    // Layout: source, m edge nodes, n vertex nodes, sink.
    let source = 0;
    let sink = 1 + m + n;
    let mut net = FlowNetwork::new(sink + 1);
    for (i, (u, v, _)) in g.edges().enumerate() {
        net.add_arc(source, 1 + i, 1);
        net.add_arc(1 + i, 1 + m + u, 1);
        net.add_arc(1 + i, 1 + m + v, 1);
    }
    let bound = u32::try_from(bound).unwrap_or(u32::MAX);
    for v in 0..n {
        net.add_arc(1 + m + v, sink, bound);
    }
    net.max_flow(source, sink) == m as u64
}

/// Smallest integer `δ` with `|E(S)| ≤ δ|S|` for every node subset `S`.
pub fn hereditary_density(g: &Graph) -> Result<usize, GraphError> {
    if !g.is_unweighted() {
        return Err(GraphError::NotUnweighted);
    }
    if g.m() == 0 {
        return Ok(0);
    }
    // Whole-graph density and the max degree bracket the answer.
    let mut lo = g.m().div_ceil(g.n());
    let mut hi = g.max_degree();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if orientation_feasible(g, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}
