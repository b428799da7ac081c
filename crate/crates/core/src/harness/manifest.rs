use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    /// Checkpoints produced or consumed by the stage.
    pub checkpoints: Vec<String>,
}

/// Provenance of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub tool_version: String,
    pub stages: Vec<StageRecord>,
    pub files: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            walk(root, &p, out)?;
        } else if p != root.join(MANIFEST_FILE) {
            out.push(p);
        }
    }
    Ok(())
}

/// Hash every file under `root` except the manifest itself.
pub fn inventory(root: &Path) -> Result<Vec<FileEntry>> {
    let mut files = Vec::new();
    walk(root, root, &mut files)?;
    files
        .iter()
        .map(|p| {
            let rel = p.strip_prefix(root).expect("walk stays under root");
            let rel = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            let bytes = fs::metadata(p).map_err(|e| Error::io(p, e))?.len();
            Ok(FileEntry {
                path: rel,
                sha256: sha256_file(p)?,
                bytes,
            })
        })
        .collect()
}

impl RunManifest {
    pub fn write(&self, root: &Path) -> Result<()> {
        let path = root.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))?;
        fs::write(&path, json).map_err(|e| Error::io(&path, e))
    }

    pub fn read(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path,
            reason: e.to_string(),
        })
    }

    /// Files whose current hash differs from the recorded one, plus files
    /// present on disk but missing from the manifest.
    pub fn verify(&self, root: &Path) -> Result<Vec<String>> {
        let now = inventory(root)?;
        let mut bad = Vec::new();
        for f in &now {
            match self.files.iter().find(|g| g.path == f.path) {
                Some(g) if g.sha256 == f.sha256 => {}
                _ => bad.push(f.path.clone()),
            }
        }
        for g in &self.files {
            if !now.iter().any(|f| f.path == g.path) {
                bad.push(g.path.clone());
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inventory_skips_manifest_and_detects_edits() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("sub")).unwrap();
        fs::write(dir.path().join("a.txt"), "x").unwrap();
        fs::write(dir.path().join("sub/b.txt"), "y").unwrap();
        let m = RunManifest {
            command: "t".into(),
            config_hash: String::new(),
            seed: 0,
            started_at: String::new(),
            finished_at: String::new(),
            tool_version: String::new(),
            stages: vec![],
            files: inventory(dir.path()).unwrap(),
        };
        m.write(dir.path()).unwrap();
        assert_eq!(m.files.len(), 2);
        assert_eq!(m.files[1].path, "sub/b.txt");
        assert!(m.verify(dir.path()).unwrap().is_empty());
        fs::write(dir.path().join("a.txt"), "z").unwrap();
        assert_eq!(m.verify(dir.path()).unwrap(), vec!["a.txt".to_string()]);
    }
}
