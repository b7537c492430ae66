//! Gather-then-compute: flood topology and tapes for `T` rounds, then run a
//! `T`-round algorithm locally on the collected ball.

use std::collections::BTreeMap;

use super::{LocalAlgorithm, Tape};
use crate::graph::NodeId;

/// `alg` rewritten as pure flooding for `horizon` rounds followed by local
/// computation. Outputs match `alg` whenever it halts within `horizon` rounds.
#[derive(Clone, Debug)]
pub struct Gatherized<A> {
    pub alg: A,
    pub horizon: usize,
}

pub fn gatherize<A: LocalAlgorithm>(alg: A, horizon: usize) -> Gatherized<A> {
    Gatherized { alg, horizon }
}

pub type Ball = BTreeMap<NodeId, (Vec<NodeId>, Tape)>;

#[derive(Clone, Debug)]
pub struct GatherState<O> {
    node: NodeId,
    known: Ball,
    rounds: usize,
    output: Option<O>,
}

impl<A: LocalAlgorithm> Gatherized<A> {
    fn compute(&self, node: NodeId, ball: &Ball) -> A::Output {
        let mut states: BTreeMap<NodeId, A::State> =
            ball.iter().map(|(&v, (nb, tape))| (v, self.alg.init(v, nb, tape))).collect();
        for _ in 0..self.horizon {
            let messages: BTreeMap<NodeId, A::Message> = states
                .iter()
                .filter(|(_, s)| !self.alg.halted(s))
                .map(|(&v, s)| (v, self.alg.message(s)))
                .collect();
            if messages.is_empty() {
                break;
            }
            for (v, s) in states.iter_mut() {
                if self.alg.halted(s) {
                    continue;
                }
                let inbox: Vec<(NodeId, A::Message)> =
                    ball[v].0.iter().filter_map(|w| messages.get(w).map(|m| (*w, m.clone()))).collect();
                self.alg.round(s, &inbox);
            }
        }
        self.alg.output(&states[&node])
    }
}

impl<A: LocalAlgorithm> LocalAlgorithm for Gatherized<A> {
    type State = GatherState<A::Output>;
    type Message = Ball;
    type Output = A::Output;

    fn name(&self) -> String {
        format!("gather{}-{}", self.horizon, self.alg.name())
    }

    fn init(&self, node: NodeId, neighbors: &[NodeId], tape: &Tape) -> Self::State {
        let known = Ball::from([(node, (neighbors.to_vec(), *tape))]);
        let output = (self.horizon == 0).then(|| self.compute(node, &known));
        GatherState { node, known, rounds: 0, output }
    }

    fn message(&self, s: &Self::State) -> Ball {
        s.known.clone()
    }

    fn round(&self, s: &mut Self::State, inbox: &[(NodeId, Ball)]) {
        for (_, ball) in inbox {
            for (v, entry) in ball {
                s.known.entry(*v).or_insert_with(|| entry.clone());
            }
        }
        s.rounds += 1;
        if s.rounds == self.horizon {
            s.output = Some(self.compute(s.node, &s.known));
        }
    }

    fn halted(&self, s: &Self::State) -> bool {
        s.rounds >= self.horizon
    }

    fn output(&self, s: &Self::State) -> A::Output {
        s.output.clone().expect("output is computed on halting")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use crate::simulate::{run_local, simulate_round_robin, BfsLabeling, Flooding, NeighborCollection, Silent};

    #[test]
    fn gathered_outputs_match() {
        for fam in [Family::Path(5), Family::Cycle(7), Family::Grid { rows: 3, cols: 3 }] {
            let g = generate(&fam).unwrap();
            let flood = Flooding::new(&g, 1);
            let reference = run_local(&g, &flood, 2, 100).unwrap();
            assert!(flood.horizon <= 4);
            let gathered = run_local(&g, &gatherize(flood, flood.horizon), 2, 100).unwrap();
            assert_eq!(gathered.outputs, reference.outputs, "{fam}");
            assert_eq!(gathered.model_rounds, flood.horizon);

            let bfs = BfsLabeling::new(&g, 0);
            let reference = run_local(&g, &bfs, 9, 100).unwrap();
            let sim = simulate_round_robin(&g, &gatherize(bfs, bfs.horizon), 9, 100).unwrap();
            assert_eq!(sim.outputs, reference.outputs, "{fam}");

            let one = run_local(&g, &gatherize(NeighborCollection, 1), 3, 10).unwrap();
            assert_eq!(one.outputs, run_local(&g, &NeighborCollection, 3, 10).unwrap().outputs);
            let zero = run_local(&g, &gatherize(Silent, 0), 3, 10).unwrap();
            assert_eq!(zero.model_rounds, 0);
            assert_eq!(zero.outputs, (0..g.n()).collect::<Vec<_>>());
        }
    }
}
