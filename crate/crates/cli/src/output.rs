//! Output files: provenance header and atomic writes.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::RunConfig;

pub const ARTIFACT_VERSION: &str = concat!("bosonet-cli ", env!("CARGO_PKG_VERSION"));

/// sha256 of the config as re-emitted, so formatting of the input file does not matter.
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn csv_header(hash: &str) -> String {
    format!("# {ARTIFACT_VERSION}\n# config_sha256 {hash}\n")
}

/// Write to a sibling temporary file, then rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub artifact_version: &'a str,
    pub config_sha256: &'a str,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(path: &Path, hash: &str, body: T) -> std::io::Result<()> {
    let env = Envelope { artifact_version: ARTIFACT_VERSION, config_sha256: hash, body };
    let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Shortest round-trip formatting; infinities as `inf`.
pub fn num(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".into()
    } else {
        format!("{x:e}")
    }
}
