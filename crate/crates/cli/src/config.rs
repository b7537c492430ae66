//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! graph = er:128:0.05:1, dumbbell:6
//! protocol = superstep
//! seeds = 0..30
//! ```
//!
//! Every key doubles as a `--key` flag on `gossip run`; flags override the
//! file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use gossip_core::graph::{generate, read_edge_list, Family, Graph, GraphError};
use gossip_core::protocols::DEFAULT_TAU_CONSTANT;
use gossip_core::simulate::DEFAULT_ROUND_CAP;
use thiserror::Error;

pub const KEYS: &[&str] = &[
    "graph",
    "graph-file",
    "protocol",
    "algorithm",
    "seeds",
    "tau",
    "tau-constant",
    "epsilon",
    "round-cap",
    "source",
    "output",
    "trace-dir",
    "threads",
];

pub const PROTOCOLS: &[&str] = &[
    "superstep",
    "rumor",
    "direct-exchange",
    "baseline",
    "uniform-broadcast",
    "sim-superstep",
    "sim-round-robin",
    "sim-direct-exchange",
    "sim-spanner-round-robin",
    "sim-spanner-direct-exchange",
    "sim-spanner-superstep",
];

/// Where a value came from, for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(l) => write!(f, "line {l}"),
            Origin::Flag => f.write_str("command line"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{origin}: {message}")]
pub struct ConfigError {
    pub origin: Origin,
    pub message: String,
}

fn err(origin: &Origin, message: impl Into<String>) -> ConfigError {
    ConfigError { origin: origin.clone(), message: message.into() }
}

/// Unvalidated key/value pairs with their origin.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(&origin, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if let Some((_, Origin::Line(first))) = raw.entries.get(key) {
                return Err(err(&origin, format!("key `{key}` already set on line {first}")));
            }
            raw.set(key, value.trim(), origin)?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(err(&origin, format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), (value.to_string(), origin));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(&str, &Origin)> {
        self.entries.get(key).map(|(v, o)| (v.as_str(), o))
    }

    fn parsed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((v, o)) => v.parse().map(Some).map_err(|_| err(o, format!("key `{key}`: `{v}` is not {what}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSpec {
    Family(Family),
    File(PathBuf),
}

impl GraphSpec {
    pub fn label(&self) -> String {
        match self {
            GraphSpec::Family(f) => f.to_string(),
            GraphSpec::File(p) => p.display().to_string(),
        }
    }

    pub fn load(&self) -> Result<Graph, GraphError> {
        match self {
            GraphSpec::Family(f) => generate(f),
            GraphSpec::File(p) => read_edge_list(p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Flooding,
    Bfs,
    Neighbors,
}

impl FromStr for Algorithm {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "flooding" => Ok(Algorithm::Flooding),
            "bfs" => Ok(Algorithm::Bfs),
            "neighbors" => Ok(Algorithm::Neighbors),
            _ => Err(()),
        }
    }
}

/// A validated experiment matrix: graphs × protocols × seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub graphs: Vec<GraphSpec>,
    pub protocols: Vec<String>,
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    /// Explicit τ; otherwise `default_tau(m, tau_constant)` per graph.
    pub tau: Option<usize>,
    pub tau_constant: f64,
    pub epsilon: f64,
    pub round_cap: usize,
    pub source: usize,
    pub output: Option<PathBuf>,
    pub trace_dir: Option<PathBuf>,
    pub threads: usize,
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// `a..b`, `a..=b` or a comma-separated list.
pub fn parse_seeds(v: &str) -> Result<Vec<u64>, String> {
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| format!("`{}` is not a seed", s.trim()));
    let seeds = if let Some((a, b)) = v.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = v.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        list(v).map(num).collect::<Result<Vec<_>, _>>()?
    };
    if seeds.is_empty() {
        return Err("seed set is empty".into());
    }
    Ok(seeds)
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut graphs = Vec::new();
        if let Some((v, o)) = raw.get("graph") {
            for d in list(v) {
                graphs.push(GraphSpec::Family(d.parse().map_err(|e: GraphError| err(o, format!("key `graph`: {e}")))?));
            }
        }
        if let Some((v, _)) = raw.get("graph-file") {
            graphs.extend(list(v).map(|p| GraphSpec::File(PathBuf::from(p))));
        }
        if graphs.is_empty() {
            return Err(err(&Origin::Default, "no graph given (set `graph` or `graph-file`)"));
        }

        let (v, o) = raw.get("protocol").ok_or_else(|| err(&Origin::Default, "no protocol given"))?;
        let mut protocols = Vec::new();
        for p in list(v) {
            if !PROTOCOLS.contains(&p) {
                return Err(err(o, format!("key `protocol`: unknown protocol `{p}` (expected one of {})", PROTOCOLS.join(", "))));
            }
            protocols.push(p.to_string());
        }
        if protocols.is_empty() {
            return Err(err(o, "key `protocol`: empty list"));
        }

        let algorithm = raw.parsed("algorithm", "one of flooding, bfs, neighbors")?.unwrap_or(Algorithm::Flooding);
        let seeds = match raw.get("seeds") {
            None => vec![0],
            Some((v, o)) => parse_seeds(v).map_err(|e| err(o, format!("key `seeds`: {e}")))?,
        };
        let tau: Option<usize> = raw.parsed("tau", "a positive integer")?;
        if tau == Some(0) {
            return Err(err(raw.get("tau").unwrap().1, "key `tau`: must be at least 1"));
        }
        let tau_constant = raw.parsed("tau-constant", "a number")?.unwrap_or(DEFAULT_TAU_CONSTANT);
        if !(tau_constant > 0.0 && f64::is_finite(tau_constant)) {
            return Err(err(raw.get("tau-constant").unwrap().1, "key `tau-constant`: must be positive"));
        }
        let epsilon = raw.parsed("epsilon", "a number")?.unwrap_or(0.5);
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(err(raw.get("epsilon").unwrap().1, "key `epsilon`: must lie in (0, 1]"));
        }
        let round_cap = raw.parsed("round-cap", "a positive integer")?.unwrap_or(DEFAULT_ROUND_CAP);
        let source = raw.parsed("source", "a node id")?.unwrap_or(0);
        let threads = match raw.parsed::<usize>("threads", "a positive integer")? {
            Some(0) => return Err(err(raw.get("threads").unwrap().1, "key `threads`: must be at least 1")),
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, usize::from),
        };
        Ok(ExperimentConfig {
            graphs,
            protocols,
            algorithm,
            seeds,
            tau,
            tau_constant,
            epsilon,
            round_cap,
            source,
            output: raw.get("output").map(|(v, _)| PathBuf::from(v)),
            trace_dir: raw.get("trace-dir").map(|(v, _)| PathBuf::from(v)),
            threads,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_reports_line() {
        let e = RawConfig::parse("graph = path:4\n\nprotocl = superstep\n").unwrap_err();
        assert_eq!(e.origin, Origin::Line(3));
        assert!(e.message.contains("protocl"));
    }

    #[test]
    fn duplicate_key_rejected() {
        let e = RawConfig::parse("seeds = 1\nseeds = 2").unwrap_err();
        assert_eq!(e.to_string(), "line 2: key `seeds` already set on line 1");
    }

    #[test]
    fn flags_override_file() {
        let mut raw = RawConfig::parse("graph = path:4 # trailing\nprotocol = baseline\nseeds = 0..3").unwrap();
        raw.set("seeds", "7,9", Origin::Flag).unwrap();
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.seeds, vec![7, 9]);
        assert_eq!(cfg.graphs, vec![GraphSpec::Family(Family::Path(4))]);
    }

    #[test]
    fn seed_forms() {
        assert_eq!(parse_seeds("2..5").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_seeds("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_seeds("4, 1").unwrap(), vec![4, 1]);
        assert!(parse_seeds("3..3").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn value_errors_name_the_key() {
        let raw = RawConfig::parse("graph = path:4\nprotocol = superstep\nepsilon = 2").unwrap();
        let e = ExperimentConfig::from_raw(&raw).unwrap_err();
        assert_eq!(e.origin, Origin::Line(3));
        assert!(e.message.contains("epsilon"));
        let raw = RawConfig::parse("graph = path:4\nprotocol = gossip-magic").unwrap();
        assert!(ExperimentConfig::from_raw(&raw).unwrap_err().message.contains("gossip-magic"));
        let raw = RawConfig::parse("graph = blob:3\nprotocol = superstep").unwrap();
        assert_eq!(ExperimentConfig::from_raw(&raw).unwrap_err().origin, Origin::Line(1));
    }
}
