//! Run manifests: every output directory gets exactly one `manifest.json`
//! recording the command, its flags, the master seed, digests of input
//! files, the tool version, and the produced files. Reruns with identical
//! inputs and flags reproduce identical outputs, manifest included.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    args: Vec<String>,
    seed: Option<u64>,
    version: String,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    Ok(hex)
}

/// Write `manifest.json` into `out_dir`.
pub fn write_manifest(
    out_dir: &Path,
    command: &str,
    seed: Option<u64>,
    inputs: &[PathBuf],
    outputs: &[&str],
) -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let manifest = RunManifest {
        command: command.to_string(),
        args,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.display().to_string(),
                    sha256: sha256_hex(p)?,
                })
            })
            .collect::<Result<_>>()?,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(())
}
