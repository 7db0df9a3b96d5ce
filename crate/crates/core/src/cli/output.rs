use super::CliError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Everything needed to rerun a command and reproduce its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub tool_version: String,
    pub threads: usize,
    pub started: String,
    pub finished: String,
    pub output_paths: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Output directory of one command; tracks the files written so the manifest
/// can list them.
pub struct OutputDir {
    root: PathBuf,
    command: String,
    seed: u64,
    parameters: BTreeMap<String, serde_json::Value>,
    started: String,
    written: Vec<String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl OutputDir {
    pub fn create(root: &Path, command: &str, seed: u64) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            command: command.to_string(),
            seed,
            parameters: BTreeMap::new(),
            started: now(),
            written: Vec::new(),
        })
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), v);
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.root.join(name), bytes)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
        self.write_bytes(name, &bytes)
    }

    /// Two whitespace-separated columns under a `#` header line.
    pub fn write_plot(&mut self, name: &str, columns: (&str, &str), points: &[(f64, f64)]) -> Result<(), CliError> {
        let mut text = format!("# {} {}\n", columns.0, columns.1);
        for (x, y) in points {
            text.push_str(&format!("{x} {y}\n"));
        }
        self.write_bytes(name, text.as_bytes())
    }

    /// Writes `manifest.json` last and returns it.
    pub fn finish(mut self) -> Result<RunManifest, CliError> {
        let manifest = RunManifest {
            command: self.command.clone(),
            parameters: std::mem::take(&mut self.parameters),
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            started: self.started.clone(),
            finished: now(),
            output_paths: self.written.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        write_atomic(&self.root.join("manifest.json"), text.as_bytes())?;
        Ok(manifest)
    }
}
