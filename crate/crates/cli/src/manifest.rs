//! Run manifests: enough to re-execute a run and regenerate its outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: Option<u64>,
    /// Output directory, or the report file for `macro`.
    pub output: PathBuf,
    /// Files written, relative to the manifest's directory.
    pub outputs: Vec<String>,
    /// Every resolved flag, defaults included, keyed by long flag name.
    pub params: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are all TOML-representable")
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Argument vector (without program name) that re-runs this manifest,
    /// optionally redirecting output into `dir`.
    pub fn to_argv(&self, dir: Option<&Path>) -> Vec<String> {
        let mut argv = vec![self.subcommand.clone()];
        for (key, value) in &self.params {
            match value.as_str() {
                "true" => argv.push(format!("--{key}")),
                "false" => {}
                _ => {
                    argv.push(format!("--{key}"));
                    argv.push(value.clone());
                }
            }
        }
        if let Some(seed) = self.seed {
            argv.push("--seed".into());
            argv.push(seed.to_string());
        }
        let output = match dir {
            Some(d) if self.subcommand == "macro" => {
                d.join(self.output.file_name().unwrap_or_default())
            }
            Some(d) => d.to_path_buf(),
            None => self.output.clone(),
        };
        let flag = if self.subcommand == "macro" {
            "--output"
        } else {
            "--out-dir"
        };
        argv.push(flag.into());
        argv.push(output.display().to_string());
        argv
    }
}
