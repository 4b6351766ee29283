//! Versioned CSV tables and the files written per subcommand.

use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Bumped whenever a column is added, removed or reinterpreted.
pub const SCHEMA_VERSION: u32 = 1;

/// One CSV file: a `# astra-sim <command> v<N>` line, the header, then rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &'static str, header: &[&'static str]) -> Self {
        Table {
            command,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut out = format!("# astra-sim {} v{SCHEMA_VERSION}\n", self.command).into_bytes();
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        drop(w);
        Ok(out)
    }
}

/// Shortest round-trip decimal form, so identical values print identically.
pub fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn csv(file_name: &str, table: &Table) -> CliResult<Self> {
        Ok(Artifact {
            file_name: file_name.to_string(),
            bytes: table.to_csv()?,
        })
    }

    pub fn text(file_name: &str, text: String) -> Self {
        Artifact {
            file_name: file_name.to_string(),
            bytes: text.into_bytes(),
        }
    }
}

/// Writes the artifacts in order, creating `dir` if needed.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for a in artifacts {
        let path = dir.join(&a.file_name);
        fs::write(&path, &a.bytes).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}
