use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

/// Sidecar describing how a result file was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Fully resolved inputs.
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub duration_secs: f64,
    /// File name of the result, relative to the manifest.
    pub output: String,
    /// SHA-256 of the result bytes, lowercase hex.
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `<out>.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        params: serde_json::Value,
        seed: Option<u64>,
        duration_secs: f64,
        out: &Path,
        bytes: &[u8],
    ) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs,
            output: out
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: sha256_hex(bytes),
        }
    }

    pub fn write_beside(&self, out: &Path) -> CliResult<()> {
        let json = serde_json::to_vec_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        write_atomic(&manifest_path(out), &json)
    }
}
