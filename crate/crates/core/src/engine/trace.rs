//! Recorded activation sequences and their text dump.
//!
//! Dump format, one block per trace:
//!
//! ```text
//! # trace n=<nodes> rounds=<count>
//! <round> <u>-><w> <u>-><w> ...
//! ```

use std::fmt::Write as _;

use super::{ActivationSet, EngineError};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessTrace {
    n: usize,
    rounds: Vec<ActivationSet>,
}

impl ProcessTrace {
    pub fn new(n: usize) -> Self {
        ProcessTrace { n, rounds: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn rounds(&self) -> &[ActivationSet] {
        &self.rounds
    }

    pub fn push(&mut self, a: ActivationSet) {
        assert_eq!(a.n(), self.n, "activation set size must match trace");
        self.rounds.push(a);
    }

    /// `K^rev`: the same activated sets in reverse round order.
    pub fn reverse(&self) -> ProcessTrace {
        ProcessTrace { n: self.n, rounds: self.rounds.iter().rev().cloned().collect() }
    }

    pub fn validate(&self, g: &Graph) -> Result<(), EngineError> {
        if self.n != g.n() {
            return Err(EngineError::SizeMismatch { expected: g.n(), got: self.n });
        }
        for (round, a) in self.rounds.iter().enumerate() {
            if let Some((u, w)) = a.edges().find(|&(u, w)| !g.has_edge(u, w)) {
                return Err(EngineError::InvalidTrace { round, u, w });
            }
        }
        Ok(())
    }
}

pub fn write_traces(traces: &[ProcessTrace]) -> String {
    let mut out = String::new();
    for t in traces {
        let _ = writeln!(out, "# trace n={} rounds={}", t.n, t.len());
        for (i, a) in t.rounds.iter().enumerate() {
            let _ = write!(out, "{i}");
            for (u, w) in a.edges() {
                let _ = write!(out, " {u}->{w}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_traces(text: &str) -> Result<Vec<ProcessTrace>, EngineError> {
    let err = |line: usize, message: String| EngineError::Parse { line, message };
    let mut traces: Vec<(ProcessTrace, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix("# trace") {
            let mut n = None;
            let mut rounds = None;
            for field in header.split_whitespace() {
                match field.split_once('=') {
                    Some(("n", v)) => n = v.parse::<usize>().ok(),
                    Some(("rounds", v)) => rounds = v.parse::<usize>().ok(),
                    _ => return Err(err(line_no, format!("unknown header field `{field}`"))),
                }
            }
            match (n, rounds) {
                (Some(n), Some(r)) => traces.push((ProcessTrace::new(n), r)),
                _ => return Err(err(line_no, "header needs n= and rounds=".into())),
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (trace, _) = traces.last_mut().ok_or_else(|| err(line_no, "round before header".into()))?;
        let mut fields = line.split_whitespace();
        let index: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| err(line_no, "missing round index".into()))?;
        if index != trace.len() {
            return Err(err(line_no, format!("expected round {}, found {index}", trace.len())));
        }
        let mut choices: Vec<Option<NodeId>> = vec![None; trace.n];
        for f in fields {
            let (u, w) = f
                .split_once("->")
                .and_then(|(u, w)| Some((u.parse::<NodeId>().ok()?, w.parse::<NodeId>().ok()?)))
                .ok_or_else(|| err(line_no, format!("bad choice `{f}`")))?;
            if u >= trace.n || w >= trace.n {
                return Err(err(line_no, format!("choice `{f}` out of range")));
            }
            if choices[u].replace(w).is_some() {
                return Err(err(line_no, format!("node {u} chose twice")));
            }
        }
        trace.push(ActivationSet::new(choices));
    }
    traces
        .into_iter()
        .enumerate()
        .map(|(i, (t, declared))| {
            if t.len() == declared {
                Ok(t)
            } else {
                Err(err(0, format!("trace {i} declares {declared} rounds, found {}", t.len())))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ProcessTrace {
        let mut t = ProcessTrace::new(3);
        t.push(ActivationSet::new(vec![Some(1), None, Some(1)]));
        t.push(ActivationSet::new(vec![None, Some(0), None]));
        t
    }

    #[test]
    fn reverse_is_an_involution() {
        let t = sample();
        assert_eq!(t.reverse().reverse(), t);
        assert_eq!(t.reverse().rounds()[0], t.rounds()[1]);
        let mut single = ProcessTrace::new(2);
        single.push(ActivationSet::new(vec![Some(1), None]));
        assert_eq!(single.reverse(), single);
    }

    #[test]
    fn dump_format() {
        let text = write_traces(&[sample()]);
        assert_eq!(text, "# trace n=3 rounds=2\n0 0->1 2->1\n1 1->0\n");
        assert_eq!(parse_traces(&text).unwrap(), vec![sample()]);
        assert!(parse_traces("0 0->1\n").is_err());
        assert!(parse_traces("# trace n=2 rounds=1\n0 0->5\n").is_err());
        assert!(parse_traces("# trace n=2 rounds=2\n0 0->1\n").is_err());
    }
}
