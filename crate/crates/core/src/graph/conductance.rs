//! Embedded conductance `Φ(H)` and strongly induced subgraphs.

use super::{cut_conductance, Graph, GraphError, NodeId, VertexSet, WEIGHT_EPS};

/// Largest set size handled by exhaustive enumeration.
pub const EXACT_LIMIT: usize = 20;

const POWER_STEPS: usize = 200;
const POWER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConductanceMode {
    /// Exact up to [`EXACT_LIMIT`], sweep-cut bound beyond.
    #[default]
    Auto,
    Exact,
    Heuristic,
}

/// Result of a conductance evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Conductance {
    /// `Φ(H)`. `f64::INFINITY` when no bipartition has two sides of positive volume.
    pub value: f64,
    /// False for sweep-cut upper bounds.
    pub certified: bool,
    /// The side `S` attaining `value`.
    pub witness: Option<VertexSet>,
}

impl Conductance {
    pub fn non_certified(&self) -> bool {
        !self.certified
    }
}

/// `Φ(H) = min_{S⊂H} φ(S, H−S)` with volumes taken in the ambient graph.
pub fn set_conductance(
    g: &Graph,
    h: &VertexSet,
    mode: ConductanceMode,
) -> Result<Conductance, GraphError> {
    if h.universe() != g.n() {
        return Err(GraphError::UniverseMismatch { set: h.universe(), graph: g.n() });
    }
    if h.len() < 2 {
        return Err(GraphError::SetTooSmall(h.len()));
    }
    let exact = match mode {
        ConductanceMode::Exact if h.len() > EXACT_LIMIT => {
            return Err(GraphError::TooLargeForExact { size: h.len(), limit: EXACT_LIMIT })
        }
        ConductanceMode::Exact => true,
        ConductanceMode::Auto => h.len() <= EXACT_LIMIT,
        ConductanceMode::Heuristic => false,
    };
    let best_side = if exact {
        let view = DenseView::new(g, h);
        let total = view.total_volume();
        let mut best: Option<(f64, u32)> = None;
        // The last member never enters S, so every bipartition is seen once.
        view.for_each_subset(view.len() - 1, |mask, vol, cut| {
            let denom = vol.min(total - vol);
            if positive_volume(denom, total) {
                let phi = cut / denom;
                if best.is_none_or(|(b, _)| phi < b) {
                    best = Some((phi, mask));
                }
            }
        });
        best.map(|(_, mask)| view.subset(mask))
    } else {
        let sweep = spectral_sweep(g, h);
        let total = sweep.total_volume;
        let mut best: Option<(f64, usize)> = None;
        for (j, &(vol, cut)) in sweep.prefixes.iter().enumerate() {
            let denom = vol.min(total - vol);
            if positive_volume(denom, total) {
                let phi = cut / denom;
                if best.is_none_or(|(b, _)| phi < b) {
                    best = Some((phi, j + 1));
                }
            }
        }
        best.map(|(_, len)| sweep.prefix_set(g.n(), len))
    };
    match best_side {
        None => Ok(Conductance { value: f64::INFINITY, certified: exact, witness: None }),
        Some(side) => {
            let value = cut_conductance(g, &side, &h.minus(&side))?;
            Ok(Conductance { value, certified: exact, witness: Some(side) })
        }
    }
}

/// Volume is non-zero beyond accumulated rounding.
pub(crate) fn positive_volume(vol: f64, total: f64) -> bool {
    vol > WEIGHT_EPS * total.max(1.0)
}

/// The strongly induced graph of `u`: node `i` is `u.members()[i]`, boundary
/// weight is folded into self-loops so volumes are preserved.
pub fn strongly_induced(g: &Graph, u: &VertexSet) -> Graph {
    let mut local = vec![usize::MAX; g.n()];
    for (i, v) in u.iter().enumerate() {
        local[v] = i;
    }
    let mut adjacency = Vec::with_capacity(u.len());
    let mut loops = Vec::with_capacity(u.len());
    for v in u.iter() {
        let mut inside = Vec::new();
        let mut outside = 0.0;
        for &(x, w) in g.weighted_neighbors(v) {
            if local[x] == usize::MAX {
                outside += w;
            } else {
                inside.push((local[x], w));
            }
        }
        adjacency.push(inside);
        loops.push(g.self_loop(v) + outside);
    }
    Graph::from_parts(adjacency, loops).expect("induced subgraph of a symmetric graph is symmetric")
}

/// Dense weight matrix over a small member set, for exhaustive enumeration.
pub(crate) struct DenseView {
    members: Vec<NodeId>,
    universe: usize,
    weights: Vec<Vec<f64>>,
    vols: Vec<f64>,
    totals: Vec<f64>,
}

impl DenseView {
    pub(crate) fn new(g: &Graph, set: &VertexSet) -> Self {
        let members = set.members().to_vec();
        let k = members.len();
        assert!(k <= 31, "dense view limited to 31 members");
        let weights: Vec<Vec<f64>> = members
            .iter()
            .map(|&a| members.iter().map(|&b| if a == b { 0.0 } else { g.weight(a, b) }).collect())
            .collect();
        let totals = weights.iter().map(|row| row.iter().sum()).collect();
        let vols = members.iter().map(|&v| g.node_volume(v)).collect();
        DenseView { members, universe: g.n(), weights, vols, totals }
    }

    pub(crate) fn len(&self) -> usize {
        self.members.len()
    }

    pub(crate) fn total_volume(&self) -> f64 {
        self.vols.iter().sum()
    }

    pub(crate) fn subset(&self, mask: u32) -> VertexSet {
        let members = (0..self.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.members[i]);
        VertexSet::from_sorted(self.universe, members.collect())
    }

    /// Visits every nonempty subset of the first `bits` members as
    /// `(mask, vol(S), w(S, H−S))`, in Gray-code order.
    pub(crate) fn for_each_subset(&self, bits: usize, mut visit: impl FnMut(u32, f64, f64)) {
        let k = self.len();
        debug_assert!(bits <= k);
        let mut mask = 0u32;
        let mut vol = 0.0;
        let mut cut = 0.0;
        let mut to_s = vec![0.0; k];
        for step in 1u64..(1u64 << bits) {
            let b = step.trailing_zeros() as usize;
            let delta = self.totals[b] - 2.0 * to_s[b];
            let sign = if mask >> b & 1 == 0 { 1.0 } else { -1.0 };
            cut += sign * delta;
            vol += sign * self.vols[b];
            mask ^= 1 << b;
            for (acc, w) in to_s.iter_mut().zip(&self.weights[b]) {
                *acc += sign * w;
            }
            visit(mask, vol, cut);
        }
    }
}

/// Prefix cuts of a spectral ordering of a vertex set.
pub(crate) struct SweepCut {
    pub(crate) order: Vec<NodeId>,
    /// `(vol(prefix), w(prefix, H − prefix))` for prefix lengths `1..|H|`.
    pub(crate) prefixes: Vec<(f64, f64)>,
    pub(crate) total_volume: f64,
}

impl SweepCut {
    pub(crate) fn prefix_set(&self, universe: usize, len: usize) -> VertexSet {
        let mut members = self.order[..len].to_vec();
        members.sort_unstable();
        VertexSet::from_sorted(universe, members)
    }
}

/// Orders `h` by the second eigenvector of the lazy normalized adjacency of its
/// strongly induced graph and records every prefix cut.
pub(crate) fn spectral_sweep(g: &Graph, h: &VertexSet) -> SweepCut {
    let sub = strongly_induced(g, h);
    let k = sub.n();
    let degree: Vec<f64> = (0..k).map(|i| sub.node_volume(i)).collect();
    let sqrt_d: Vec<f64> = degree.iter().map(|d| d.sqrt()).collect();
    let norm_top = sqrt_d.iter().map(|x| x * x).sum::<f64>().sqrt();
    let top: Vec<f64> =
        sqrt_d.iter().map(|x| if norm_top > 0.0 { x / norm_top } else { 0.0 }).collect();

    let project = |x: &mut Vec<f64>| {
        let dot: f64 = x.iter().zip(&top).map(|(a, b)| a * b).sum();
        for (xi, ti) in x.iter_mut().zip(&top) {
            *xi -= dot * ti;
        }
        for (xi, d) in x.iter_mut().zip(&degree) {
            if *d <= 0.0 {
                *xi = 0.0;
            }
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            x.iter_mut().for_each(|v| *v /= norm);
        }
    };

    // Deterministic, non-degenerate start.
    let mut x: Vec<f64> = (0..k)
        .map(|i| ((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    project(&mut x);
    for _ in 0..POWER_STEPS {
        let mut y = vec![0.0; k];
        for i in 0..k {
            if degree[i] <= 0.0 {
                continue;
            }
            let mut acc = sub.self_loop(i) * x[i] / degree[i];
            for &(j, w) in sub.weighted_neighbors(i) {
                acc += w * x[j] / (sqrt_d[i] * sqrt_d[j]);
            }
            y[i] = 0.5 * (x[i] + acc);
        }
        project(&mut y);
        let diff = y.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        x = y;
        if diff < POWER_TOL {
            break;
        }
    }

    let mut idx: Vec<usize> = (0..k).collect();
    let key = |i: usize| if degree[i] > 0.0 { x[i] / sqrt_d[i] } else { f64::INFINITY };
    idx.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));

    let mut in_prefix = vec![false; k];
    let mut to_prefix = vec![0.0; k];
    let totals: Vec<f64> =
        (0..k).map(|i| sub.weighted_neighbors(i).iter().map(|&(_, w)| w).sum()).collect();
    let mut vol = 0.0;
    let mut cut = 0.0;
    let mut prefixes = Vec::with_capacity(k.saturating_sub(1));
    for &i in idx.iter().take(k.saturating_sub(1)) {
        cut += totals[i] - 2.0 * to_prefix[i];
        vol += degree[i];
        in_prefix[i] = true;
        for &(j, w) in sub.weighted_neighbors(i) {
            to_prefix[j] += w;
        }
        prefixes.push((vol, cut));
    }
    let order = idx.iter().map(|&i| h.members()[i]).collect();
    SweepCut { order, prefixes, total_volume: degree.iter().sum() }
}
