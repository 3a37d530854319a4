//! Run manifests: what was run, with which settings and seeds.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub seeds: Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Only filled in with `--timing`; left null so reruns are byte-identical.
    pub wall_clock_ms: Option<u64>,
}

impl Manifest {
    pub fn new(command: &'static str, config: impl Serialize, seeds: Value) -> Result<Self> {
        let config = serde_json::to_value(config).map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: sphere_sne::VERSION,
            command,
            config,
            seeds,
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_clock_ms: None,
        })
    }

    pub fn input(mut self, p: &Path) -> Self {
        self.inputs.push(p.display().to_string());
        self
    }

    pub fn output(mut self, p: &Path) -> Self {
        self.outputs.push(p.display().to_string());
        self
    }

    pub fn timed(mut self, started: Instant, timing: bool) -> Self {
        if timing {
            self.wall_clock_ms = Some(started.elapsed().as_millis() as u64);
        }
        self
    }
}

pub fn to_json<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
