//! In-memory artifact collection and the single writer that flushes it.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{input_err, CliError, CliResult};

/// Comma-delimited table built in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
    width: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self {
            writer,
            width: header.len(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        assert_eq!(cells.len(), self.width, "row width");
        self.writer
            .write_record(cells.iter().map(AsRef::as_ref))
            .expect("in-memory write");
    }

    pub fn finish(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

#[derive(Debug, Clone)]
pub struct Artifact {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub phase: &'static str,
    pub kind: &'static str,
    pub params: Map<String, Value>,
    pub contents: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct ArtifactSet {
    pub artifacts: Vec<Artifact>,
}

impl ArtifactSet {
    pub fn add(
        &mut self,
        phase: &'static str,
        kind: &'static str,
        path: String,
        params: Value,
        contents: Vec<u8>,
    ) {
        let params = match params {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => panic!("artifact params must be an object, got {other}"),
        };
        self.artifacts.push(Artifact {
            path,
            phase,
            kind,
            params,
            contents,
        });
    }

    pub fn find(&self, path: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.path == path)
    }

    /// Manifest listing every artifact with its parameters, plus the
    /// resolved configuration.
    pub fn manifest(&self, config: Value) -> Vec<u8> {
        let entries: Vec<Value> = self
            .artifacts
            .iter()
            .map(|a| {
                json!({
                    "path": a.path,
                    "phase": a.phase,
                    "kind": a.kind,
                    "params": a.params,
                })
            })
            .collect();
        let doc = json!({ "config": config, "artifacts": entries });
        let mut out = serde_json::to_vec_pretty(&doc).expect("manifest serializes");
        out.push(b'\n');
        out
    }

    /// Writes every artifact and the manifest under `dir`. Files are
    /// staged in a sibling directory first and moved into place only once
    /// all of them were written.
    pub fn write(&self, dir: &Path, manifest: &[u8]) -> CliResult<Vec<PathBuf>> {
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.artifacts {
            if !seen.insert(a.path.as_str()) || a.path == "manifest.json" {
                return Err(CliError::Internal(format!("artifact path `{}` written twice", a.path)));
            }
        }
        fs::create_dir_all(dir).map_err(|e| input_err!("cannot create {}: {e}", dir.display()))?;
        let staging = dir.join(format!(".simba-staging-{}", std::process::id()));
        let result = self.stage_and_commit(dir, &staging, manifest);
        let _ = fs::remove_dir_all(&staging);
        result
    }

    fn stage_and_commit(&self, dir: &Path, staging: &Path, manifest: &[u8]) -> CliResult<Vec<PathBuf>> {
        let io = |p: &Path, e: std::io::Error| input_err!("cannot write {}: {e}", p.display());
        let files: Vec<(&str, &[u8])> = self
            .artifacts
            .iter()
            .map(|a| (a.path.as_str(), a.contents.as_slice()))
            .chain(std::iter::once(("manifest.json", manifest)))
            .collect();
        for (rel, bytes) in &files {
            let p = staging.join(rel);
            if let Some(parent) = p.parent() {
                fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
            }
            fs::write(&p, bytes).map_err(|e| io(&p, e))?;
        }
        let mut written = Vec::with_capacity(files.len());
        for (rel, _) in &files {
            let target = dir.join(rel);
            if let Some(parent) = target.parent() {
                fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
            }
            fs::rename(staging.join(rel), &target).map_err(|e| io(&target, e))?;
            written.push(target);
        }
        Ok(written)
    }
}
