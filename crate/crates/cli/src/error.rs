use std::fmt;
use std::path::{Path, PathBuf};

use astra_core::Error as CoreError;

/// A failed subcommand, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent configuration (exit 2).
    Config(String),
    /// Missing fixtures, unreadable inputs or unwritable outputs (exit 3).
    Io(String),
    /// Anything else the simulator rejected (exit 1).
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Run(_) => 1,
        }
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn missing_fixture(path: &Path) -> Self {
        CliError::Io(format!(
            "fixture {} not found. The model and dataset fixtures are committed under \
             crates/core/fixtures; restore them with `git checkout -- crates/core/fixtures` \
             or point infer.model / infer.dataset at a copy",
            path.display()
        ))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Run(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(_)
            | CoreError::ConfigKey { .. }
            | CoreError::ConfigParse(_)
            | CoreError::UnknownPreset { .. } => CliError::Config(e.to_string()),
            CoreError::Io { .. } | CoreError::TensorFormat { .. } | CoreError::EmptyDataset => {
                CliError::Io(e.to_string())
            }
            _ => CliError::Run(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
