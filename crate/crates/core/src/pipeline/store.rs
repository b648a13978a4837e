//! Stage directories, atomic writes, manifests and the run lock.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::sha256_hex;
use super::{PipelineError, Stage};

/// Write `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn hash_file(path: &Path) -> Result<String, PipelineError> {
    Ok(sha256_hex(&fs::read(path)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub tool_version: String,
    /// Hash of the whole semantic configuration.
    pub config_hash: String,
    /// Hash of the configuration fields this stage reads.
    pub stage_config_hash: String,
    /// Input path (relative to the output directory when inside it) to hash.
    pub inputs: BTreeMap<String, String>,
    /// Output file name (relative to the stage directory) to hash.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn path(stage_dir: &Path) -> PathBuf {
        stage_dir.join("manifest.json")
    }

    pub fn read(stage_dir: &Path) -> Option<Self> {
        let text = fs::read_to_string(Self::path(stage_dir)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn write(&self, stage_dir: &Path) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_atomic(&Self::path(stage_dir), text.as_bytes())
    }

    /// The recorded outputs still exist with the recorded content.
    pub fn outputs_intact(&self, stage_dir: &Path) -> bool {
        self.outputs
            .iter()
            .all(|(name, h)| hash_file(&stage_dir.join(name)).is_ok_and(|x| &x == h))
    }
}

/// Key under which an input path is recorded: relative to `root` when
/// inside it, so manifests do not depend on where the output directory lives.
pub fn input_key(root: &Path, path: &Path) -> String {
    path.strip_prefix(root)
        .map(|p| p.to_string_lossy().replace('\\', "/"))
        .unwrap_or_else(|_| path.to_string_lossy().into_owned())
}

/// Hash every input; a missing one names the stage that produces it.
pub fn hash_inputs(root: &Path, inputs: &[(PathBuf, String)]) -> Result<BTreeMap<String, String>, PipelineError> {
    let mut out = BTreeMap::new();
    for (path, producer) in inputs {
        if !path.is_file() {
            return Err(PipelineError::MissingInput {
                path: path.clone(),
                producer: producer.clone(),
            });
        }
        out.insert(input_key(root, path), hash_file(path)?);
    }
    Ok(out)
}

/// Files produced by a stage, collected in memory and committed together.
#[derive(Debug, Default)]
pub struct Outputs {
    files: BTreeMap<String, Vec<u8>>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.insert(name.into(), bytes);
    }

    pub fn add_text(&mut self, name: impl Into<String>, text: String) {
        self.add(name, text.into_bytes());
    }

    /// Write every file atomically and return their hashes.
    pub fn commit(self, stage_dir: &Path) -> Result<BTreeMap<String, String>, PipelineError> {
        fs::create_dir_all(stage_dir)?;
        let mut hashes = BTreeMap::new();
        for (name, bytes) in self.files {
            write_atomic(&stage_dir.join(&name), &bytes)?;
            hashes.insert(name, sha256_hex(&bytes));
        }
        Ok(hashes)
    }
}

/// Exclusive lock on an output directory, released on drop.
#[derive(Debug)]
pub struct RunLock {
    path: PathBuf,
}

impl RunLock {
    pub fn acquire(outdir: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(outdir)?;
        let path = outdir.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(Self { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(PipelineError::Locked(path)),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub fn stage_dir(outdir: &Path, stage: Stage) -> PathBuf {
    outdir.join(stage.name())
}
