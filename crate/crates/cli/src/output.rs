use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};

/// Scalar with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number carrying 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(
            serde_json::from_str::<Number>(&fmt17(x)).expect("finite float is a JSON number"),
        )
    } else {
        Value::Null
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// A table of named numeric columns, written as CSV or JSON lines.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, mut w: W, format: Format) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(w, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|x| fmt17(*x)).collect();
                    writeln!(w, "{}", cells.join(","))?;
                }
            }
            Format::JsonLines => {
                for row in &self.rows {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, x)| (c.to_string(), num(*x)))
                        .collect();
                    writeln!(w, "{}", Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }
}

/// Output directory plus the list of files written into it.
pub struct Outputs {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
    pub written: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path, formats: Vec<Format>) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            formats,
            written: Vec::new(),
        })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub fn table(&mut self, stem: &str, table: &Table) -> Result<()> {
        for f in self.formats.clone() {
            let path = self.path(&format!("{stem}.{}", f.extension()));
            let file = fs::File::create(&path)
                .with_context(|| format!("cannot write {}", path.display()))?;
            table.write(std::io::BufWriter::new(file), f)?;
        }
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
    }

    /// Writes `manifest.json`: configuration hash, versions, seed and the
    /// resolved configuration, enough to reproduce every emitted scalar.
    pub fn manifest(&mut self, command: &str, config: &RunConfig) -> Result<()> {
        let canonical = config.canonical();
        let hash = Sha256::digest(canonical.as_bytes());
        let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        let mut files = self.written.clone();
        files.push("manifest.json".into());
        let doc = json!({
            "command": command,
            "cli_version": env!("CARGO_PKG_VERSION"),
            "library_version": hardy_choquard::VERSION,
            "seed": config.seed,
            "config_sha256": hex,
            "config": canonical,
            "files": files,
        });
        self.json("manifest.json", &doc)
    }
}
