//! Experiment runner for `gossip-core`: config parsing, the run matrix, the
//! verification battery and the spanner command.

pub mod config;
pub mod run;
pub mod verify;

use std::fs;
use std::path::Path;

use gossip_core::engine::parse_traces;
use gossip_core::graph::Graph;
use gossip_core::spanner::{extract_spanner, write_spanner, SpannerResult};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {0}")]
    Config(#[from] config::ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot load graph {0}")]
    Load(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Load(_) | CliError::Io(_) => 3,
        }
    }
}

/// Extracts the spanner recorded in a trace dump; returns the result and its
/// edge-list text.
pub fn spanner_from_dump(g: &Graph, dump: &Path) -> Result<(SpannerResult, String), CliError> {
    let text = fs::read_to_string(dump).map_err(|e| CliError::Io(format!("{}: {e}", dump.display())))?;
    let traces = parse_traces(&text).map_err(|e| CliError::Load(format!("{}: {e}", dump.display())))?;
    let s = extract_spanner(g, &traces).map_err(|e| CliError::Usage(format!("spanner extraction failed: {e}")))?;
    let out = write_spanner(&s);
    Ok((s, out))
}
