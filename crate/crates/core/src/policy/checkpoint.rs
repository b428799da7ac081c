//! Policy checkpoint files.
//!
//! Layout: the magic `MGPOLICY`, a little-endian `u32` format version, a
//! little-endian `u64` header length, a JSON header (spec, layer table,
//! parameter count, SHA-256 of the payload) and finally the parameters as
//! little-endian `f64` in layer-table order.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::network::PolicyParams;
use super::spec::{LayerShape, PolicySpec};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"MGPOLICY";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    spec: PolicySpec,
    layers: Vec<LayerShape>,
    param_count: usize,
    checksum: String,
}

fn payload_bytes(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write `params` to `path`, replacing any existing file.
pub fn save_policy(params: &PolicyParams, path: &Path) -> Result<()> {
    let payload = payload_bytes(&params.values);
    let header = Header {
        spec: params.spec.clone(),
        layers: params.spec.layers(),
        param_count: params.values.len(),
        checksum: digest(&payload),
    };
    let header = serde_json::to_vec(&header).map_err(|e| Error::Internal(e.to_string()))?;
    let mut buf = Vec::with_capacity(20 + header.len() + payload.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(header.len() as u64).to_le_bytes());
    buf.extend_from_slice(&header);
    buf.extend_from_slice(&payload);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a checkpoint, verifying its checksum.
pub fn load_policy(path: &Path) -> Result<PolicyParams> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let corrupt = |reason: &str| Error::Corrupt {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(corrupt("not a policy checkpoint"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(corrupt(&format!("unsupported format version {version}")));
    }
    let header_len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let header_end = 20usize
        .checked_add(header_len)
        .filter(|&end| end <= bytes.len())
        .ok_or_else(|| Error::Checksum {
            path: path.to_path_buf(),
            expected: "complete header".into(),
            found: format!("{} bytes", bytes.len()),
        })?;
    let header: Header = serde_json::from_slice(&bytes[20..header_end])
        .map_err(|e| corrupt(&format!("bad header: {e}")))?;
    let payload = &bytes[header_end..];
    let found = digest(payload);
    if found != header.checksum {
        return Err(Error::Checksum {
            path: path.to_path_buf(),
            expected: header.checksum,
            found,
        });
    }
    if header.layers != header.spec.layers() || header.param_count != header.spec.param_count() {
        return Err(corrupt("layer table disagrees with spec"));
    }
    if payload.len() != header.param_count * 8 {
        return Err(corrupt("payload length disagrees with parameter count"));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    PolicyParams::from_values(header.spec, values)
}

/// Read a checkpoint and check that it fits `expected`.
pub fn load_policy_for(path: &Path, expected: &PolicySpec) -> Result<PolicyParams> {
    let params = load_policy(path)?;
    if params.spec == *expected {
        return Ok(params);
    }
    let want = expected.layers();
    let got = params.spec.layers();
    for (w, g) in want.iter().zip(&got) {
        if w != g {
            return Err(Error::Shape {
                layer: w.name.clone(),
                reason: format!(
                    "expected {}x{}, checkpoint has {} {}x{}",
                    w.rows, w.cols, g.name, g.rows, g.cols
                ),
            });
        }
    }
    if want.len() != got.len() {
        let name = want
            .get(got.len())
            .or_else(|| got.get(want.len()))
            .map(|l| l.name.clone())
            .unwrap_or_default();
        return Err(Error::Shape {
            layer: name,
            reason: format!("expected {} layers, checkpoint has {}", want.len(), got.len()),
        });
    }
    Err(Error::Shape {
        layer: "spec".into(),
        reason: format!(
            "checkpoint is for {:?}, expected {:?}",
            params.spec, expected
        ),
    })
}
