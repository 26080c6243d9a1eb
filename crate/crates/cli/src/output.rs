//! Output plumbing: versioned JSON envelopes, optional CSV, and the
//! ORDERWALK_OUT_DIR convention for relative output paths.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::json;

pub struct OutputTarget {
    pub path: Option<PathBuf>,
    pub csv: bool,
}

impl OutputTarget {
    pub fn new(path: Option<PathBuf>, csv: bool) -> Self {
        let path = path.filter(|p| p != Path::new("-"));
        OutputTarget { path, csv }
    }

    /// Relative paths land under ORDERWALK_OUT_DIR when it is set.
    pub fn resolve(&self, path: &Path) -> Result<PathBuf> {
        if path.is_absolute() {
            return Ok(path.to_path_buf());
        }
        match std::env::var_os("ORDERWALK_OUT_DIR") {
            Some(dir) => {
                let dir = PathBuf::from(dir);
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                Ok(dir.join(path))
            }
            None => Ok(path.to_path_buf()),
        }
    }

    pub fn write_text(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => {
                let p = self.resolve(p)?;
                std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

/// Write the standard envelope: schema version, subcommand name, echoed
/// settings, results, and a timestamp (the only field excluded from
/// reproducibility comparisons).
pub fn emit(
    target: &OutputTarget,
    name: &str,
    settings: serde_json::Value,
    results: serde_json::Value,
) -> Result<()> {
    let timestamp_ms = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
    let doc = json!({
        "schema": 1,
        "name": name,
        "settings": settings,
        "results": results,
        "timestamp_ms": timestamp_ms,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    target.write_text(&text)
}
