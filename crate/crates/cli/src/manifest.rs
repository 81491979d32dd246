//! Run manifests embedded in every report file.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record for one CLI invocation: what ran, on which inputs,
/// with which seeds. Reruns with an identical command line and inputs
/// produce byte-identical numeric payloads; only the timing fields vary.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seeds: Vec<u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub wall_time_ms: u64,
    pub unix_time_s: u64,
}

/// Accumulates manifest data while a command runs.
pub struct ManifestBuilder {
    started: Instant,
    command: String,
    seeds: Vec<u64>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

impl ManifestBuilder {
    pub fn new() -> Self {
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        Self { started: Instant::now(), command, seeds: Vec::new(), inputs: Vec::new(), outputs: Vec::new() }
    }

    pub fn record_seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    /// Record an input file and its content hash; silently skips files
    /// that cannot be read (the command itself will report the error).
    pub fn record_input(&mut self, path: &str) {
        if let Ok(bytes) = std::fs::read(path) {
            let digest = Sha256::digest(&bytes);
            let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
            self.inputs.push(InputDigest { path: path.to_string(), sha256 });
        }
    }

    pub fn record_output(&mut self, path: &str) {
        self.outputs.push(path.to_string());
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: self.seeds,
            inputs: self.inputs,
            outputs: self.outputs,
            wall_time_ms: self.started.elapsed().as_millis() as u64,
            unix_time_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}
