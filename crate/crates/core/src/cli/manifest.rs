use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{Mode, RunConfig};
use crate::dp::SolveResult;
use crate::grid::io::{decode_policy, decode_values, encode_policy, encode_values, read_bytes, write_bytes};
use crate::grid::{PolicyTable, ValueTable};
use crate::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    Value,
    Policy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub kind: TableKind,
    pub stage: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub stage: usize,
    pub clamped: u64,
    pub evaluations: u64,
}

/// Index of a solve's output directory. Wall times are printed, not stored,
/// so that a manifest is a pure function of its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub solver_version: String,
    pub system: String,
    pub mode: Mode,
    pub horizon: usize,
    pub files: Vec<FileEntry>,
    pub diagnostics: Vec<StageEntry>,
    pub config: RunConfig,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_name(kind: TableKind, stage: usize) -> String {
    match kind {
        TableKind::Value => format!("value_{stage:04}.srdp"),
        TableKind::Policy => format!("policy_{stage:04}.srdp"),
    }
}

impl Manifest {
    /// Writes every table of `result` and the manifest into `dir`.
    pub fn write(dir: &Path, config: &RunConfig, result: &SolveResult) -> Result<Manifest> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = Vec::new();
        let mut emit = |kind: TableKind, stage: usize, bytes: Vec<u8>| -> Result<()> {
            let name = file_name(kind, stage);
            write_bytes(&dir.join(&name), &bytes)?;
            files.push(FileEntry {
                path: name,
                kind,
                stage,
                sha256: sha256_hex(&bytes),
            });
            Ok(())
        };
        for table in &result.values {
            emit(TableKind::Value, table.stage, encode_values(table))?;
        }
        for table in &result.policies {
            emit(TableKind::Policy, table.stage, encode_policy(table))?;
        }
        let mut diagnostics: Vec<StageEntry> = result
            .diagnostics
            .iter()
            .map(|d| StageEntry {
                stage: d.stage,
                clamped: d.clamped,
                evaluations: d.evaluations,
            })
            .collect();
        diagnostics.sort_by_key(|d| d.stage);
        let manifest = Manifest {
            solver_version: env!("CARGO_PKG_VERSION").to_string(),
            system: config.system.name().to_string(),
            mode: config.mode,
            horizon: result.horizon,
            files,
            diagnostics,
            config: config.clone(),
        };
        let text = toml::to_string(&manifest).map_err(|e| Error::Format(e.to_string()))?;
        let path = dir.join(MANIFEST_NAME);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }

    /// Reads a manifest and checks every listed file against its hash.
    pub fn load(path: &Path) -> Result<LoadedManifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = toml::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for entry in &manifest.files {
            let file = dir.join(&entry.path);
            let actual = sha256_hex(&read_bytes(&file)?);
            if actual != entry.sha256 {
                return Err(Error::HashMismatch {
                    path: file,
                    expected: entry.sha256.clone(),
                    actual,
                });
            }
        }
        Ok(LoadedManifest { manifest, dir })
    }
}

/// A manifest whose files were verified on load.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub manifest: Manifest,
    pub dir: PathBuf,
}

impl LoadedManifest {
    fn entry(&self, kind: TableKind, stage: usize) -> Result<PathBuf> {
        self.manifest
            .files
            .iter()
            .find(|f| f.kind == kind && f.stage == stage)
            .map(|f| self.dir.join(&f.path))
            .ok_or_else(|| {
                Error::Format(format!("manifest lists no {kind:?} table for stage {stage}"))
            })
    }

    pub fn value_table(&self, stage: usize) -> Result<ValueTable> {
        decode_values(&read_bytes(&self.entry(TableKind::Value, stage)?)?)
    }

    pub fn policy_table(&self, stage: usize) -> Result<PolicyTable> {
        decode_policy(&read_bytes(&self.entry(TableKind::Policy, stage)?)?)
    }

    /// Policy tables for stages `0..N`, as a solve result for rollouts.
    pub fn solution(&self) -> Result<SolveResult> {
        let horizon = self.manifest.horizon;
        let policies = (0..horizon)
            .map(|k| self.policy_table(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(SolveResult {
            values: vec![self.value_table(0)?],
            policies,
            diagnostics: Vec::new(),
            horizon,
        })
    }
}
