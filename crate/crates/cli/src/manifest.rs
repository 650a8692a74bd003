//! Run manifests embedded in every report.

use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    /// Arguments after the program name, exactly as given.
    pub command: Vec<String>,
    pub inputs: Vec<Input>,
    pub seed: u64,
    pub config: Value,
    pub version: String,
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: &[String], seed: u64) -> Self {
        RunManifest {
            command: command.to_vec(),
            inputs: Vec::new(),
            seed,
            config: Value::Object(Map::new()),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn record(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(Input { path: path.display().to_string(), sha256: digest(bytes) });
    }

    /// `# key: value` lines ahead of a text report.
    pub fn header(&self) -> String {
        let mut out = format!("# landau {}\n", self.version);
        out.push_str(&format!("# command: {}\n", Value::from(self.command.clone())));
        for i in &self.inputs {
            out.push_str(&format!("# input: {} sha256={}\n", i.path, i.sha256));
        }
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# config: {}\n", self.config));
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tool": format!("landau {}", self.version),
            "command": self.command,
            "inputs": self.inputs.iter().map(|i| json!({"path": i.path, "sha256": i.sha256})).collect::<Vec<_>>(),
            "seed": self.seed,
            "config": self.config,
        })
    }

    /// Recover the manifest from a text header or a JSON report.
    pub fn extract(report: &str) -> Option<RunManifest> {
        if report.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(report).ok()?;
            return Self::from_json(v.get("manifest")?);
        }
        let mut m = RunManifest::new(&[], 0);
        m.version = report.lines().next()?.strip_prefix("# landau ")?.to_string();
        for line in report.lines().skip(1) {
            let Some(rest) = line.strip_prefix("# ") else { break };
            let (key, value) = rest.split_once(": ")?;
            match key {
                "command" => m.command = serde_json::from_str(value).ok()?,
                "input" => {
                    let (path, hash) = value.rsplit_once(" sha256=")?;
                    m.inputs.push(Input { path: path.to_string(), sha256: hash.to_string() });
                }
                "seed" => m.seed = value.parse().ok()?,
                "config" => m.config = serde_json::from_str(value).ok()?,
                _ => return None,
            }
        }
        Some(m)
    }

    fn from_json(v: &Value) -> Option<RunManifest> {
        let command: Vec<String> = serde_json::from_value(v.get("command")?.clone()).ok()?;
        let mut m = RunManifest::new(&command, v.get("seed")?.as_u64()?);
        m.version = v.get("tool")?.as_str()?.strip_prefix("landau ")?.to_string();
        m.config = v.get("config")?.clone();
        for i in v.get("inputs")?.as_array()? {
            m.inputs.push(Input {
                path: i.get("path")?.as_str()?.to_string(),
                sha256: i.get("sha256")?.as_str()?.to_string(),
            });
        }
        Some(m)
    }
}

/// Put the manifest first in a JSON document.
pub fn embed(manifest: &RunManifest, body: Value) -> String {
    let mut out = Map::new();
    out.insert("manifest".into(), manifest.to_json());
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    serde_json::to_string_pretty(&Value::Object(out)).expect("json serializes") + "\n"
}
