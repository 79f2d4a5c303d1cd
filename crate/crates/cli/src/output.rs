use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tcsim_core::io::CsvTable;
use tcsim_core::Result;

/// Provenance stamped on every output file. Nothing in it varies between identical runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the resolved parameters and device.
    pub config_sha256: String,
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &str, resolved: &impl Serialize, seed: u64) -> Self {
        let canonical = serde_json::to_vec(resolved).expect("configs serialise");
        Meta {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: hex::encode(Sha256::digest(&canonical)),
            seed,
        }
    }

    /// `#`-prefixed lines placed above a CSV body.
    pub fn csv_header(&self) -> String {
        format!(
            "# tool: {} {}\n# command: {}\n# config_sha256: {}\n# seed: {}\n",
            self.tool, self.version, self.command, self.config_sha256, self.seed
        )
    }
}

/// Writes into one directory, in call order, and remembers what it wrote.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    meta: Meta,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path, meta: Meta) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            meta,
            written: Vec::new(),
        })
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    fn put(&mut self, name: &str, text: String) -> Result<()> {
        let path = self.root.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        let text = self.meta.csv_header() + &table.render();
        self.put(name, text)
    }

    /// `{"meta": ..., "result": ...}`.
    pub fn json(&mut self, name: &str, result: &impl Serialize) -> Result<()> {
        let doc = serde_json::json!({ "meta": &self.meta, "result": result });
        let mut text = serde_json::to_string_pretty(&doc).expect("results serialise");
        text.push('\n');
        self.put(name, text)
    }

    /// File written verbatim, without a header.
    pub fn raw(&mut self, name: &str, text: String) -> Result<()> {
        self.put(name, text)
    }

    pub fn into_written(self) -> Vec<PathBuf> {
        self.written
    }
}

/// CSV text with the metadata lines removed.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_follows_the_parameters() {
        let a = Meta::new("cz", &(1, "x"), 0);
        assert_eq!(a, Meta::new("cz", &(1, "x"), 0));
        assert_ne!(a.config_sha256, Meta::new("cz", &(2, "x"), 0).config_sha256);
        assert_eq!(a.config_sha256.len(), 64);
    }

    #[test]
    fn body_drops_only_metadata() {
        let text = Meta::new("cz", &0, 4).csv_header() + "a,b\n1,2\n";
        assert_eq!(csv_body(&text), "a,b\n1,2\n");
    }
}
