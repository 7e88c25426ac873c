use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use causal_forge::{CnfFormula, Digraph, Plan, PlanningInstance};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to re-run a command and check that it reproduced its
/// outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    /// Input path to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    /// Output path to SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Reads inputs and writes outputs for one command, recording digests.
pub struct Run {
    pub seed: u64,
    pub human: bool,
    pub jobs: usize,
    out_dir: Option<PathBuf>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl Run {
    pub fn new(seed: u64, human: bool, jobs: usize, out_dir: Option<PathBuf>) -> Self {
        Run {
            seed,
            human,
            jobs,
            out_dir,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.inputs.insert(display(path), digest(text.as_bytes()));
        Ok(text)
    }

    pub fn read_instance(&mut self, path: &Path) -> Result<PlanningInstance> {
        let text = self.read(path)?;
        PlanningInstance::from_json(&text).map_err(|e| CliError::input(path, e))
    }

    pub fn read_graph(&mut self, path: &Path) -> Result<Digraph> {
        let text = self.read(path)?;
        Digraph::from_edge_list(&text).map_err(|e| CliError::input(path, e))
    }

    pub fn read_cnf(&mut self, path: &Path) -> Result<CnfFormula> {
        let text = self.read(path)?;
        CnfFormula::parse_dimacs(&text).map_err(|e| CliError::input(path, e))
    }

    pub fn read_plan(&mut self, path: &Path) -> Result<Plan> {
        Ok(Plan::from_text(&self.read(path)?))
    }

    pub fn has_out_dir(&self) -> bool {
        self.out_dir.is_some()
    }

    pub fn require_out_dir(&self, what: &str) -> Result<()> {
        if self.out_dir.is_none() {
            return Err(CliError::Usage(format!("{what} needs an output directory (-o DIR)")));
        }
        Ok(())
    }

    /// Writes `name` into the output directory.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<String> {
        let dir = self
            .out_dir
            .clone()
            .ok_or_else(|| CliError::Usage("an output directory (-o DIR) is required".into()))?;
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(io(&path))?;
        let shown = display(&path);
        self.outputs.insert(shown.clone(), digest(contents.as_bytes()));
        Ok(shown)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<String> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(name, &text)
    }

    pub fn written(&self) -> Vec<String> {
        self.outputs.keys().cloned().collect()
    }

    /// Writes the manifest next to the outputs, if there are any.
    pub fn finish(self, command: &str, arguments: Vec<String>) -> Result<()> {
        let Some(dir) = &self.out_dir else {
            return Ok(());
        };
        if self.outputs.is_empty() {
            return Ok(());
        }
        let manifest = RunManifest {
            command: command.to_string(),
            arguments,
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, text).map_err(|source| CliError::Io { path, source })
    }
}

/// Files whose digests differ from the manifest, or that are missing.
pub fn changed_files(recorded: &BTreeMap<String, String>) -> Vec<String> {
    recorded
        .iter()
        .filter(|(path, hash)| fs::read(path).map(|b| &digest(&b) != *hash).unwrap_or(true))
        .map(|(p, _)| p.clone())
        .collect()
}
