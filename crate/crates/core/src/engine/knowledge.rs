//! Which message identifiers each node holds.

use std::collections::HashMap;

use super::EngineError;
use crate::graph::{DirectedEdgeSet, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageKind {
    Payload,
    AuxA,
    AuxB,
}

/// A message identifier; contents are out of scope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MessageId {
    pub kind: MessageKind,
    pub origin: NodeId,
    pub tag: u32,
}

impl MessageId {
    pub fn payload(origin: NodeId) -> Self {
        MessageId { kind: MessageKind::Payload, origin, tag: 0 }
    }
}

/// Traffic counters for one or more rounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoundStats {
    pub rounds: usize,
    /// Undirected connections, `|A°|/2` per round.
    pub connections: usize,
    /// Identifiers carried over all directed transfers.
    pub transfers: u64,
}

impl std::ops::AddAssign for RoundStats {
    fn add_assign(&mut self, other: Self) {
        self.rounds += other.rounds;
        self.connections += other.connections;
        self.transfers += other.transfers;
    }
}

/// Per-node sets of known messages, stored as a dense bit matrix over a
/// catalog of identifiers.
#[derive(Clone, Debug)]
pub struct KnowledgeState {
    n: usize,
    catalog: Vec<MessageId>,
    index: HashMap<MessageId, usize>,
    words: usize,
    bits: Vec<u64>,
    scratch: Vec<u64>,
}

impl PartialEq for KnowledgeState {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && (0..self.n).all(|u| self.known(u) == other.known(u))
    }
}

impl KnowledgeState {
    pub fn new(n: usize) -> Self {
        KnowledgeState {
            n,
            catalog: Vec::new(),
            index: HashMap::new(),
            words: 0,
            bits: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Every node holds exactly its own payload.
    pub fn with_own_payloads(n: usize) -> Self {
        let mut s = Self::new(n);
        s.introduce_own(MessageKind::Payload, 0);
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn catalog(&self) -> &[MessageId] {
        &self.catalog
    }

    fn reserve_columns(&mut self, columns: usize) {
        let needed = columns.div_ceil(64);
        if needed <= self.words {
            return;
        }
        let words = needed.max(self.words * 2);
        let mut bits = vec![0u64; self.n * words];
        for u in 0..self.n {
            bits[u * words..u * words + self.words]
                .copy_from_slice(&self.bits[u * self.words..(u + 1) * self.words]);
        }
        self.bits = bits;
        self.words = words;
    }

    fn register(&mut self, id: MessageId) -> usize {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        let i = self.catalog.len();
        self.reserve_columns(i + 1);
        self.catalog.push(id);
        self.index.insert(id, i);
        i
    }

    fn set_bit(&mut self, u: NodeId, col: usize) {
        self.bits[u * self.words + col / 64] |= 1 << (col % 64);
    }

    fn get_bit(&self, u: NodeId, col: usize) -> bool {
        self.bits[u * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    /// Hands `id` to node `at`.
    pub fn introduce(&mut self, id: MessageId, at: NodeId) {
        let col = self.register(id);
        self.set_bit(at, col);
    }

    /// Gives every node `v` a fresh message `(kind, v, tag)`.
    pub fn introduce_own(&mut self, kind: MessageKind, tag: u32) {
        self.reserve_columns(self.catalog.len() + self.n);
        for v in 0..self.n {
            self.introduce(MessageId { kind, origin: v, tag }, v);
        }
    }

    pub fn knows(&self, u: NodeId, id: &MessageId) -> bool {
        self.index.get(id).is_some_and(|&col| self.get_bit(u, col))
    }

    /// Whether `u` holds the tag-0 payload of `origin`.
    pub fn knows_payload(&self, u: NodeId, origin: NodeId) -> bool {
        self.knows(u, &MessageId::payload(origin))
    }

    /// Known identifiers of `u`, sorted.
    pub fn known(&self, u: NodeId) -> Vec<MessageId> {
        let mut ids: Vec<MessageId> =
            (0..self.catalog.len()).filter(|&c| self.get_bit(u, c)).map(|c| self.catalog[c]).collect();
        ids.sort();
        ids
    }

    pub fn count(&self, u: NodeId) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, u: NodeId) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    /// Drops every identifier matching `pred` from all nodes.
    pub fn discard(&mut self, pred: impl Fn(&MessageId) -> bool) {
        let keep: Vec<usize> = (0..self.catalog.len()).filter(|&c| !pred(&self.catalog[c])).collect();
        if keep.len() == self.catalog.len() {
            return;
        }
        let mut next = KnowledgeState::new(self.n);
        next.reserve_columns(keep.len());
        for &c in &keep {
            let id = self.catalog[c];
            let col = next.register(id);
            for u in 0..self.n {
                if self.get_bit(u, c) {
                    next.set_bit(u, col);
                }
            }
        }
        *self = next;
    }

    /// One simultaneous exchange over every edge of a symmetric closure: each
    /// endpoint receives what the other knew before the round.
    pub fn apply_round(&mut self, closure: &DirectedEdgeSet) -> Result<RoundStats, EngineError> {
        if closure.n() != self.n {
            return Err(EngineError::SizeMismatch { expected: self.n, got: closure.n() });
        }
        if let Some((u, w)) = closure.asymmetry_witness() {
            return Err(EngineError::AsymmetricClosure(u, w));
        }
        let words = self.words;
        self.scratch.clear();
        self.scratch.extend_from_slice(&self.bits);
        let mut transfers = 0u64;
        for (u, w) in closure.iter() {
            let src = &self.scratch[w * words..(w + 1) * words];
            transfers += src.iter().map(|x| x.count_ones() as u64).sum::<u64>();
            for (dst, s) in self.bits[u * words..(u + 1) * words].iter_mut().zip(src) {
                *dst |= s;
            }
        }
        Ok(RoundStats { rounds: 1, connections: closure.len() / 2, transfers })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_single_edge_round() {
        let mut s = KnowledgeState::with_own_payloads(3);
        let closure = DirectedEdgeSet::from_pairs(3, [(0, 1), (1, 0)]);
        let stats = s.apply_round(&closure).unwrap();
        assert!(s.knows_payload(0, 1) && s.knows_payload(1, 0));
        assert_eq!(s.count(2), 1);
        assert_eq!(stats, RoundStats { rounds: 1, connections: 1, transfers: 2 });
    }

    #[test]
    fn empty_closure_is_identity() {
        let mut s = KnowledgeState::with_own_payloads(4);
        let before = s.clone();
        s.apply_round(&DirectedEdgeSet::new(4)).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn no_relay_within_a_round() {
        let mut s = KnowledgeState::with_own_payloads(3);
        let closure = DirectedEdgeSet::from_pairs(3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]);
        s.apply_round(&closure).unwrap();
        for u in 0..3 {
            assert_eq!(s.count(u), 3);
        }
        // On a path, the far end must not hear the other end in one round.
        let mut p = KnowledgeState::with_own_payloads(3);
        p.apply_round(&DirectedEdgeSet::from_pairs(3, [(0, 1), (1, 0), (1, 2), (2, 1)])).unwrap();
        assert!(!p.knows_payload(0, 2) && !p.knows_payload(2, 0));
        assert!(p.knows_payload(1, 0) && p.knows_payload(1, 2));
    }

    #[test]
    fn rejects_asymmetric_closure() {
        let mut s = KnowledgeState::with_own_payloads(2);
        let err = s.apply_round(&DirectedEdgeSet::from_pairs(2, [(0, 1)])).unwrap_err();
        assert_eq!(err, EngineError::AsymmetricClosure(0, 1));
    }

    #[test]
    fn discard_keeps_other_columns() {
        let mut s = KnowledgeState::with_own_payloads(70);
        s.introduce_own(MessageKind::AuxA, 3);
        s.introduce(MessageId { kind: MessageKind::AuxA, origin: 5, tag: 3 }, 69);
        assert!(s.knows(69, &MessageId { kind: MessageKind::AuxA, origin: 5, tag: 3 }));
        s.discard(|id| id.kind == MessageKind::AuxA);
        assert_eq!(s.catalog().len(), 70);
        assert!(s.knows_payload(69, 69));
        assert_eq!(s.count(69), 1);
    }
}
