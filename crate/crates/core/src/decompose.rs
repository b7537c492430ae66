//! Conductance decomposition as a small-scale certifying oracle.
//!
//! `Cluster(G, U, ξ)` repeatedly removes a maximum-volume sparse cut. With
//! `ξ = 3ζ / log_{4/3} vol(V)` every cluster then has conductance at least
//! `ζ / log_{4/3} vol(V)` and the clusters cut at most `(3ζ/2)·vol(V)` weight.
//! Sparse cuts are found by exhaustive enumeration up to [`EXACT_LIMIT`]
//! members and by a spectral sweep beyond that (uncertified).

use std::cmp::Ordering;
use std::fmt;

use crate::graph::{
    cut_weight, set_conductance, spectral_sweep, strongly_induced, volume, Conductance, ConductanceMode,
    positive_volume, DenseView, Graph, GraphError, VertexSet, EXACT_LIMIT,
};

const VOLUME_TOL: f64 = 1e-9;
const PHI_TOL: f64 = 1e-12;

/// `log_{4/3} x`.
pub fn log43(x: f64) -> f64 {
    x.ln() / (4.0f64 / 3.0).ln()
}

/// `ξ = 3ζ / log_{4/3} vol(V)`.
pub fn xi_for_zeta(g: &Graph, zeta: f64) -> Result<f64, GraphError> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(GraphError::InvalidParams(format!("zeta must lie in (0, 1), got {zeta}")));
    }
    let depth = log43(g.total_volume());
    if depth.is_nan() || depth <= 0.0 {
        return Err(GraphError::ZeroVolume);
    }
    Ok(3.0 * zeta / depth)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseCut {
    pub set: VertexSet,
    pub volume: f64,
    pub phi: f64,
    pub certified: bool,
}

/// Step 1 of `Cluster`: a maximum-volume `S ⊆ U` with `vol(S) ≤ vol(U)/2` and
/// `φ(S, U−S) ≤ ξ`. Ties go to the lexicographically smallest member list.
pub fn find_sparse_cut(
    g: &Graph,
    u: &VertexSet,
    xi: f64,
    mode: ConductanceMode,
) -> Result<Option<SparseCut>, GraphError> {
    if u.universe() != g.n() {
        return Err(GraphError::UniverseMismatch { set: u.universe(), graph: g.n() });
    }
    let exact = match mode {
        ConductanceMode::Exact if u.len() > EXACT_LIMIT => {
            return Err(GraphError::TooLargeForExact { size: u.len(), limit: EXACT_LIMIT })
        }
        ConductanceMode::Exact => true,
        ConductanceMode::Auto => u.len() <= EXACT_LIMIT,
        ConductanceMode::Heuristic => false,
    };
    if u.len() < 2 {
        return Ok(None);
    }
    let set = if exact { exact_sparse_cut(g, u, xi) } else { sweep_sparse_cut(g, u, xi) };
    Ok(set.map(|s| {
        let rest = u.minus(&s);
        let vol = volume(g, &s);
        let phi = cut_weight(g, &s, &rest) / vol.min(volume(g, &rest));
        SparseCut { set: s, volume: vol, phi, certified: exact }
    }))
}

fn eligible(vol: f64, cut: f64, total: f64, xi: f64) -> bool {
    let denom = vol.min(total - vol);
    positive_volume(denom, total) && vol <= total / 2.0 + VOLUME_TOL && cut / denom <= xi + PHI_TOL
}

/// Lexicographic order of the sorted member lists encoded by two masks.
fn lex_cmp(a: u32, b: u32) -> Ordering {
    let d = a ^ b;
    if d == 0 {
        return Ordering::Equal;
    }
    let p = d.trailing_zeros();
    let (with, without) = if a >> p & 1 == 1 { (a, b) } else { (b, a) };
    let with_first = (without >> p) != 0;
    let a_first = (with == a) == with_first;
    if a_first {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn exact_sparse_cut(g: &Graph, u: &VertexSet, xi: f64) -> Option<VertexSet> {
    let view = DenseView::new(g, u);
    let total = view.total_volume();
    let full = (1u32 << view.len()) - 1;
    let mut best: Option<(f64, u32)> = None;
    view.for_each_subset(view.len(), |mask, vol, cut| {
        if mask == full || !eligible(vol, cut, total, xi) {
            return;
        }
        best = match best {
            None => Some((vol, mask)),
            Some((bv, _)) if vol > bv + VOLUME_TOL => Some((vol, mask)),
            Some((bv, bm)) if vol >= bv - VOLUME_TOL && lex_cmp(mask, bm) == Ordering::Less => {
                Some((bv.max(vol), mask))
            }
            keep => keep,
        };
    });
    best.map(|(_, mask)| view.subset(mask))
}

fn sweep_sparse_cut(g: &Graph, u: &VertexSet, xi: f64) -> Option<VertexSet> {
    let sweep = spectral_sweep(g, u);
    let total = sweep.total_volume;
    let mut best: Option<(f64, usize, bool)> = None;
    for (j, &(vol, cut)) in sweep.prefixes.iter().enumerate() {
        // Either the prefix or its complement may be the small side.
        for (side_vol, is_prefix) in [(vol, true), (total - vol, false)] {
            if eligible(side_vol, cut, total, xi) && best.is_none_or(|(b, _, _)| side_vol > b + VOLUME_TOL) {
                best = Some((side_vol, j + 1, is_prefix));
            }
        }
    }
    best.map(|(_, len, is_prefix)| {
        let prefix = sweep.prefix_set(g.n(), len);
        if is_prefix {
            prefix
        } else {
            u.minus(&prefix)
        }
    })
}

#[derive(Clone, Debug)]
pub struct ClusterPartition {
    pub clusters: Vec<VertexSet>,
    pub xi: f64,
    /// `None` for clusters with fewer than two members (vacuous).
    pub conductances: Vec<Option<Conductance>>,
    pub cut_weight: f64,
    /// Deepest recursion level reached; the top call is depth 0.
    pub depth: usize,
    pub certified: bool,
}

/// `Cluster(G, U, ξ)`.
pub fn cluster(g: &Graph, u: &VertexSet, xi: f64, mode: ConductanceMode) -> Result<ClusterPartition, GraphError> {
    let mut clusters = Vec::new();
    let mut depth = 0;
    let mut certified = true;
    recurse(g, u.clone(), xi, mode, 0, &mut clusters, &mut depth, &mut certified)?;
    clusters.sort_by(|a, b| a.members().cmp(b.members()));
    let conductances = clusters
        .iter()
        .map(|c| {
            if c.len() < 2 {
                Ok(None)
            } else {
                set_conductance(g, c, mode).map(Some)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    certified &= conductances.iter().flatten().all(|c| c.certified);
    let cut_weight = partition_cut_weight(g, &clusters);
    Ok(ClusterPartition { clusters, xi, conductances, cut_weight, depth, certified })
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    g: &Graph,
    u: VertexSet,
    xi: f64,
    mode: ConductanceMode,
    level: usize,
    out: &mut Vec<VertexSet>,
    depth: &mut usize,
    certified: &mut bool,
) -> Result<(), GraphError> {
    *depth = (*depth).max(level);
    let Some(cut) = find_sparse_cut(g, &u, xi, mode)? else {
        out.push(u);
        return Ok(());
    };
    *certified &= cut.certified;
    let rest = u.minus(&cut.set);
    if cut.volume <= volume(g, &u) / 4.0 {
        out.push(rest);
        recurse(g, cut.set, xi, mode, level + 1, out, depth, certified)
    } else {
        recurse(g, cut.set, xi, mode, level + 1, out, depth, certified)?;
        recurse(g, rest, xi, mode, level + 1, out, depth, certified)
    }
}

/// `Σ_{i<j} w(V_i, V_j)`, counted once per edge with endpoints in different parts.
/// Nodes outside every part are ignored.
pub fn partition_cut_weight(g: &Graph, parts: &[VertexSet]) -> f64 {
    let mut label = vec![usize::MAX; g.n()];
    for (i, p) in parts.iter().enumerate() {
        for v in p.iter() {
            label[v] = i;
        }
    }
    g.edges()
        .filter(|&(a, b, _)| label[a] != usize::MAX && label[b] != usize::MAX && label[a] != label[b])
        .map(|(_, _, w)| w)
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterCheck {
    pub members: VertexSet,
    /// Recomputed `Φ(V_i)`; `None` when vacuous.
    pub phi: Option<f64>,
    pub certified: bool,
    pub stored_matches: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    pub zeta: f64,
    pub xi: f64,
    pub volume: f64,
    pub conductance_bound: f64,
    pub cut_bound: f64,
    pub clusters: Vec<ClusterCheck>,
    pub cut_weight: f64,
    pub cut_ok: bool,
    pub cover_ok: bool,
    pub stored_cut_matches: bool,
    pub depth: usize,
    pub depth_ok: bool,
}

impl PartitionReport {
    pub fn violations(&self) -> usize {
        self.clusters.iter().filter(|c| !c.ok || !c.stored_matches).count()
            + [self.cut_ok, self.cover_ok, self.stored_cut_matches, self.depth_ok].iter().filter(|ok| !**ok).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

impl fmt::Display for PartitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "zeta {} xi {} volume {}", self.zeta, self.xi, self.volume)?;
        writeln!(f, "conductance_bound {}", self.conductance_bound)?;
        for c in &self.clusters {
            let phi = c.phi.map_or("vacuous".to_string(), |p| p.to_string());
            let tag = if c.certified { "" } else { " non_certified" };
            writeln!(f, "cluster {} phi {phi}{tag} {}", c.members, if c.ok { "ok" } else { "VIOLATION" })?;
        }
        writeln!(
            f,
            "cut_weight {} bound {} {}",
            self.cut_weight,
            self.cut_bound,
            if self.cut_ok { "ok" } else { "VIOLATION" }
        )?;
        writeln!(f, "cover {}", if self.cover_ok { "ok" } else { "VIOLATION" })?;
        write!(f, "depth {} {}", self.depth, if self.depth_ok { "ok" } else { "VIOLATION" })
    }
}

/// Checks a partition against `Φ(V_i) ≥ ζ / log_{4/3} vol(V)` and
/// `Σ w(V_i, V_j) ≤ (3ζ/2)·vol(V)`, recomputing everything from `g`.
pub fn verify_partition(g: &Graph, p: &ClusterPartition, zeta: f64) -> PartitionReport {
    let vol = g.total_volume();
    let depth_limit = log43(vol);
    let conductance_bound = if depth_limit > 0.0 { zeta / depth_limit } else { 0.0 };
    let cut_bound = 1.5 * zeta * vol;

    let mut seen = vec![false; g.n()];
    let mut cover_ok = true;
    for c in &p.clusters {
        cover_ok &= c.universe() == g.n() && !c.is_empty();
        for v in c.iter() {
            cover_ok &= !std::mem::replace(&mut seen[v], true);
        }
    }
    cover_ok &= seen.iter().all(|&s| s);

    let clusters = p
        .clusters
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let recomputed = if c.len() < 2 { None } else { set_conductance(g, c, ConductanceMode::Auto).ok() };
            let stored = p.conductances.get(i).cloned().flatten();
            let stored_matches = match (&recomputed, &stored) {
                (Some(a), Some(b)) => a.value == b.value || (a.value - b.value).abs() <= 1e-9,
                (None, None) => true,
                _ => false,
            };
            let phi = recomputed.as_ref().map(|c| c.value);
            ClusterCheck {
                members: c.clone(),
                phi,
                certified: recomputed.as_ref().is_none_or(|c| c.certified),
                stored_matches,
                ok: phi.is_none_or(|v| v >= conductance_bound - PHI_TOL),
            }
        })
        .collect();

    let cut = partition_cut_weight(g, &p.clusters);
    PartitionReport {
        zeta,
        xi: p.xi,
        volume: vol,
        conductance_bound,
        cut_bound,
        clusters,
        cut_weight: cut,
        cut_ok: cut <= cut_bound + VOLUME_TOL,
        cover_ok,
        stored_cut_matches: (cut - p.cut_weight).abs() <= VOLUME_TOL,
        depth: p.depth,
        depth_ok: p.depth as f64 <= depth_limit.max(0.0) + VOLUME_TOL,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalcutReport {
    pub cut: Option<SparseCut>,
    pub volume_u: f64,
    /// `vol(S) ≤ vol(U)/4`, with no cut counting as volume 0.
    pub triggered: bool,
    /// `Φ(U−S)` on the strongly induced graph; `None` when vacuous or not triggered.
    pub phi_rest: Option<f64>,
    pub bound: f64,
    pub holds: bool,
}

/// If the maximal sparse cut `S` of `U` has `vol(S) ≤ vol(U)/4`, checks
/// `Φ(U−S) ≥ ξ/3`.
pub fn verify_balcut(g: &Graph, u: &VertexSet, xi: f64) -> Result<BalcutReport, GraphError> {
    let cut = find_sparse_cut(g, u, xi, ConductanceMode::Exact)?;
    let volume_u = volume(g, u);
    let vol_s = cut.as_ref().map_or(0.0, |c| c.volume);
    let triggered = vol_s <= volume_u / 4.0;
    let bound = xi / 3.0;
    let mut phi_rest = None;
    if triggered {
        let rest = match &cut {
            Some(c) => u.minus(&c.set),
            None => u.clone(),
        };
        if rest.len() >= 2 {
            let sub = strongly_induced(g, &rest);
            let phi = set_conductance(&sub, &VertexSet::all(sub.n()), ConductanceMode::Exact)?;
            phi_rest = Some(phi.value);
        }
    }
    let holds = phi_rest.is_none_or(|p| p >= bound - PHI_TOL);
    Ok(BalcutReport { cut, volume_u, triggered, phi_rest, bound, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    fn all(g: &Graph) -> VertexSet {
        VertexSet::all(g.n())
    }

    #[test]
    fn lex_order_on_masks() {
        // {0,1} < {0,2} < {1}
        assert_eq!(lex_cmp(0b011, 0b101), Ordering::Less);
        assert_eq!(lex_cmp(0b101, 0b010), Ordering::Less);
        // {0} < {0,1}: a proper prefix comes first.
        assert_eq!(lex_cmp(0b001, 0b011), Ordering::Less);
        assert_eq!(lex_cmp(0b011, 0b001), Ordering::Greater);
    }

    #[test]
    fn sparse_cut_examples() {
        let db = generate(&Family::Dumbbell(4)).unwrap();
        let cut = find_sparse_cut(&db, &all(&db), 0.2, ConductanceMode::Exact).unwrap().unwrap();
        assert_eq!(cut.set.members(), &[0, 1, 2, 3]);
        assert_eq!(cut.volume, 13.0);
        assert!((cut.phi - 1.0 / 13.0).abs() < 1e-12);
        let k4 = generate(&Family::Clique(4)).unwrap();
        assert_eq!(find_sparse_cut(&k4, &all(&k4), 0.5, ConductanceMode::Exact).unwrap(), None);
        let single = VertexSet::new(4, [2]).unwrap();
        assert_eq!(find_sparse_cut(&k4, &single, 0.5, ConductanceMode::Exact).unwrap(), None);
        let big = generate(&Family::Path(21)).unwrap();
        assert!(matches!(
            find_sparse_cut(&big, &all(&big), 0.1, ConductanceMode::Exact),
            Err(GraphError::TooLargeForExact { .. })
        ));
    }

    #[test]
    fn heuristic_cut_on_large_dumbbell() {
        let db = generate(&Family::Dumbbell(12)).unwrap();
        let cut = find_sparse_cut(&db, &all(&db), 0.05, ConductanceMode::Heuristic).unwrap().unwrap();
        assert!(!cut.certified);
        assert_eq!(cut.set.len(), 12);
        assert!(cut.phi <= 0.05);
    }

    #[test]
    fn cluster_examples() {
        let k4 = generate(&Family::Clique(4)).unwrap();
        let p = cluster(&k4, &all(&k4), 0.5, ConductanceMode::Exact).unwrap();
        assert_eq!(p.clusters, vec![all(&k4)]);
        assert_eq!(p.cut_weight, 0.0);

        let two = generate(&Family::DisjointCliques { count: 2, size: 3 }).unwrap();
        let p = cluster(&two, &all(&two), 0.3, ConductanceMode::Exact).unwrap();
        assert_eq!(p.clusters.len(), 2);
        assert_eq!(p.cut_weight, 0.0);

        let one = Graph::empty(1);
        let p = cluster(&one, &all(&one), 0.3, ConductanceMode::Exact).unwrap();
        assert_eq!(p.clusters, vec![all(&one)]);
        assert!(verify_partition(&one, &p, 1.0 / 3.0).passed());
    }

    #[test]
    fn dumbbell_partition_verifies() {
        let g = generate(&Family::Dumbbell(3)).unwrap();
        for zeta in [1.0 / 6.0, 1.0 / 3.0] {
            let xi = xi_for_zeta(&g, zeta).unwrap();
            let p = cluster(&g, &all(&g), xi, ConductanceMode::Exact).unwrap();
            let r = verify_partition(&g, &p, zeta);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn edgeless_singletons_pass() {
        let g = Graph::empty(3);
        let clusters: Vec<VertexSet> = (0..3).map(|v| VertexSet::new(3, [v]).unwrap()).collect();
        let p = ClusterPartition {
            conductances: vec![None; 3],
            clusters,
            xi: 0.1,
            cut_weight: 0.0,
            depth: 0,
            certified: true,
        };
        assert!(verify_partition(&g, &p, 1.0 / 6.0).passed());
    }

    #[test]
    fn bad_partition_is_checked_against_formula() {
        let g = generate(&Family::Clique(4)).unwrap();
        let clusters = vec![VertexSet::new(4, [0, 1]).unwrap(), VertexSet::new(4, [2, 3]).unwrap()];
        let conductances =
            clusters.iter().map(|c| Some(set_conductance(&g, c, ConductanceMode::Exact).unwrap())).collect();
        let p = ClusterPartition { clusters, xi: 0.1, conductances, cut_weight: 4.0, depth: 0, certified: true };
        let r = verify_partition(&g, &p, 1.0 / 3.0);
        // Each pair: Φ = 1/3 against ζ/log_{4/3} 12 ≈ 0.039; cut 4 against 0.5 · 12 = 6.
        assert!(r.clusters.iter().all(|c| (c.phi.unwrap() - 1.0 / 3.0).abs() < 1e-12 && c.ok));
        assert!(r.cut_ok);
        let r = verify_partition(&g, &p, 0.2);
        assert!(!r.cut_ok);
        let mut broken = p.clone();
        broken.clusters.pop();
        assert!(!verify_partition(&g, &broken, 1.0 / 3.0).cover_ok);
    }

    #[test]
    fn balcut_examples() {
        let k4 = generate(&Family::Clique(4)).unwrap();
        let r = verify_balcut(&k4, &all(&k4), 0.5).unwrap();
        assert!(r.cut.is_none() && r.triggered && r.holds);
        assert!((r.phi_rest.unwrap() - 2.0 / 3.0).abs() < 1e-12);

        let star = generate(&Family::Star { leaves: 8 }).unwrap();
        let r = verify_balcut(&star, &all(&star), 0.3).unwrap();
        assert!(r.holds, "{r:?}");

        let k2 = generate(&Family::Path(2)).unwrap();
        let r = verify_balcut(&k2, &all(&k2), 1.0).unwrap();
        assert_eq!(r.cut.as_ref().unwrap().set.members(), &[0]);
        assert!(!r.triggered && r.holds);
    }

    #[test]
    fn zeta_validation() {
        let g = generate(&Family::Clique(4)).unwrap();
        assert!(xi_for_zeta(&g, 0.0).is_err());
        assert_eq!(xi_for_zeta(&Graph::empty(3), 0.2), Err(GraphError::ZeroVolume));
        assert!((xi_for_zeta(&g, 1.0 / 3.0).unwrap() - 1.0 / log43(12.0)).abs() < 1e-12);
    }
}
