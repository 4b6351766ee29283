use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite input")]
    NonFiniteInput,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("stream length mismatch: {left} vs {right}")]
    StreamLengthMismatch { left: usize, right: usize },

    #[error("correlated operands: both streams come from channel {0:#018x}")]
    CorrelatedOperands(u64),

    #[error("channel generator {channel:?} does not match configured generator {config:?}")]
    GeneratorMismatch {
        channel: crate::sc::Generator,
        config: crate::sc::Generator,
    },

    #[error("accumulator overflow: analog sum {sum} outside [-{range}, {range}]")]
    AccumulatorOverflow { sum: f64, range: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown preset {name:?}; available presets: {available}")]
    UnknownPreset { name: String, available: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("malformed tensor file {path}: {reason}")]
    TensorFormat { path: PathBuf, reason: String },

    #[error("config key {key:?}: {reason}")]
    ConfigKey { key: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
