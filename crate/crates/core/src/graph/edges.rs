//! Sets of directed edges, stored as sorted per-node out-lists.

use super::{Graph, NodeId};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DirectedEdgeSet {
    out: Vec<Vec<NodeId>>,
    len: usize,
}

impl DirectedEdgeSet {
    pub fn new(n: usize) -> Self {
        DirectedEdgeSet { out: vec![Vec::new(); n], len: 0 }
    }

    /// `E⃗`: both orientations of every edge of `g`.
    pub fn from_graph(g: &Graph) -> Self {
        let out: Vec<Vec<NodeId>> = (0..g.n()).map(|u| g.neighbors(u).collect()).collect();
        let len = out.iter().map(Vec::len).sum();
        DirectedEdgeSet { out, len }
    }

    pub fn from_pairs<I: IntoIterator<Item = (NodeId, NodeId)>>(n: usize, pairs: I) -> Self {
        let mut set = Self::new(n);
        for (u, w) in pairs {
            set.insert(u, w);
        }
        set
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn out(&self, u: NodeId) -> &[NodeId] {
        &self.out[u]
    }

    pub fn contains(&self, u: NodeId, w: NodeId) -> bool {
        self.out[u].binary_search(&w).is_ok()
    }

    /// Returns false if the edge was already present.
    pub fn insert(&mut self, u: NodeId, w: NodeId) -> bool {
        match self.out[u].binary_search(&w) {
            Ok(_) => false,
            Err(i) => {
                self.out[u].insert(i, w);
                self.len += 1;
                true
            }
        }
    }

    pub fn remove(&mut self, u: NodeId, w: NodeId) -> bool {
        match self.out[u].binary_search(&w) {
            Ok(i) => {
                self.out[u].remove(i);
                self.len -= 1;
                true
            }
            Err(_) => false,
        }
    }

    /// Removes every edge of `other` (set difference in place).
    pub fn remove_all(&mut self, other: &DirectedEdgeSet) {
        for (u, list) in self.out.iter_mut().enumerate() {
            if other.out[u].is_empty() {
                continue;
            }
            let before = list.len();
            list.retain(|w| other.out[u].binary_search(w).is_err());
            self.len -= before - list.len();
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out.iter().enumerate().flat_map(|(u, l)| l.iter().map(move |&w| (u, w)))
    }

    /// The first `(u, w)` whose reverse is missing, if any.
    pub fn asymmetry_witness(&self) -> Option<(NodeId, NodeId)> {
        self.iter().find(|&(u, w)| !self.contains(w, u))
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry_witness().is_none()
    }

    /// Whether every edge joins two adjacent nodes of `g`.
    pub fn within(&self, g: &Graph) -> bool {
        self.n() == g.n() && self.iter().all(|(u, w)| g.has_edge(u, w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_and_symmetry() {
        let mut s = DirectedEdgeSet::new(3);
        assert!(s.insert(0, 1));
        assert!(!s.insert(0, 1));
        assert!(!s.is_symmetric());
        assert_eq!(s.asymmetry_witness(), Some((0, 1)));
        s.insert(1, 0);
        assert!(s.is_symmetric());
        assert_eq!(s.len(), 2);
        let other = DirectedEdgeSet::from_pairs(3, [(1, 0), (2, 1)]);
        s.remove_all(&other);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(s.remove(0, 1));
        assert!(s.is_empty());
    }
}
