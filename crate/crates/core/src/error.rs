use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0} must be at least 1")]
    NonPositive(&'static str),
    #[error("unknown response policy `{0}` (expected swt or mwt)")]
    UnknownPolicy(String),
    #[error("victim script entry {thief} -> {victim} is out of range for p={num_procs}")]
    ScriptOutOfRange {
        thief: usize,
        victim: usize,
        num_procs: usize,
    },
    #[error("victim script makes processor {0} steal from itself")]
    ScriptSelfSteal(usize),
    #[error("victim script line {line}: expected `thief -> victim`, got `{text}`")]
    Script { line: usize, text: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("{name} must be strictly positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("accept factor must exceed 1 (got {0})")]
    AcceptFactor(f64),
    #[error("W={work} is outside the model domain W > 2*lambda (lambda={latency})")]
    OutOfDomain { work: f64, latency: f64 },
    #[error("no limit latency for W={work}, p={procs}: {reason}")]
    NoSolution {
        work: f64,
        procs: f64,
        reason: &'static str,
    },
    #[error("cannot fit c': every regressor is zero")]
    DegenerateFit,
    #[error("empty dataset")]
    EmptyDataset,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sweep is missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("sweep grid is empty")]
    EmptyProduct,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("no results to write")]
    NoResults,
    #[error("trace message {id} ({kind}) has no matching {missing}")]
    UnpairedMessage {
        id: u64,
        kind: String,
        missing: &'static str,
    },
    #[error("trace message {id} takes {duration} time units, expected lambda={latency}")]
    LinkDuration { id: u64, duration: u64, latency: u64 },
}
