//! Reproducibility headers and file writing.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use conicert::report::{to_canonical_value, to_json_string};

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `#` comment lines (without the `# ` prefix) heading every CSV.
pub fn csv_header(command: &str, cfg: &RunConfig) -> Vec<String> {
    vec![
        format!("tool: conicert {VERSION}"),
        format!("command: {command}"),
        format!("config: {}", cfg.resolved()),
        format!("seed: {}", cfg.seed),
        format!("tolerances: {}", to_canonical_value(&cfg.tolerances)),
    ]
}

/// Provenance fields merged into every JSON report.
pub fn provenance(command: &str, cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("conicert"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), cfg.resolved());
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("tolerances".into(), to_canonical_value(&cfg.tolerances));
    m
}

pub fn out_path(cfg: &RunConfig, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::io(&cfg.out_dir, e))?;
    Ok(cfg.out_dir.join(name))
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    fs::write(path, to_json_string(v)).map_err(|e| CliError::io(path, e))
}

/// Runs `body` on a buffered file writer and flushes it.
pub fn write_with<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
{
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}
