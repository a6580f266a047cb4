//! Run manifests: every file-producing invocation writes a JSON manifest
//! next to its first output, recording the command line, the configuration,
//! the crate version, a timestamp, and a SHA-256 checksum of every output
//! file. `verify --manifest` re-checks the checksums.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

fn manifest_path(first_output: &Path) -> PathBuf {
    let mut name = first_output
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    name.push_str(".manifest.json");
    first_output.with_file_name(name)
}

/// Write every `(path, contents)` pair and one manifest covering them all.
/// Returns the manifest path.
pub fn write_outputs(
    files: &[(PathBuf, String)],
    config: Value,
    seed: Option<u64>,
) -> io::Result<PathBuf> {
    let mut outputs = Vec::new();
    for (path, contents) in files {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(path, contents)?;
        outputs.push(json!({
            "path": path.to_string_lossy(),
            "sha256": sha256_hex(contents.as_bytes()),
        }));
    }
    let manifest = json!({
        "command": std::env::args().collect::<Vec<_>>(),
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "seed": seed,
        "outputs": outputs,
    });
    let path = manifest_path(&files[0].0);
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

/// Re-hash every output referenced by a manifest; returns the mismatches.
pub fn check(manifest_file: &Path) -> io::Result<Vec<String>> {
    let text = fs::read_to_string(manifest_file)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    let outputs = v
        .get("outputs")
        .and_then(Value::as_array)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "manifest has no outputs"))?;
    let mut problems = Vec::new();
    for entry in outputs {
        let (Some(path), Some(expect)) = (
            entry.get("path").and_then(Value::as_str),
            entry.get("sha256").and_then(Value::as_str),
        ) else {
            problems.push(format!("malformed output entry: {entry}"));
            continue;
        };
        match fs::read(path) {
            Ok(bytes) => {
                let got = sha256_hex(&bytes);
                if got != expect {
                    problems.push(format!("{path}: checksum mismatch ({got} != {expect})"));
                }
            }
            Err(e) => problems.push(format!("{path}: {e}")),
        }
    }
    Ok(problems)
}
