//! Scenario files, the bundled corpus, the runner and its reports.

mod corpus;
pub mod dsl;
mod run;

use std::path::Path;

pub use corpus::{corpus, run_corpus, CorpusEntry};
pub use dsl::{parse_scenario, Directive, DirectiveKind, Scenario, Target};
pub use run::{run_scenario, ExpectFailure, Format, LineKind, Report, ReportLine, RunOptions};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("{file}:{line}: syntax error: {message}")]
    Syntax {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: unknown system `{name}`")]
    UnknownSystem {
        file: String,
        line: usize,
        name: String,
    },
    #[error("{file}:{line}: {message}")]
    Load {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}: cannot read: {message}")]
    Io { file: String, message: String },
    #[error("{scenario}:{line}: {message}")]
    Runtime {
        scenario: String,
        line: usize,
        message: String,
    },
}

impl HarnessError {
    /// Errors raised before any directive runs.
    pub fn is_load_error(&self) -> bool {
        !matches!(self, HarnessError::Runtime { .. })
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, HarnessError> {
    let path = path.as_ref();
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        file: file.clone(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| file.clone());
    parse_scenario(&name, &file, &text)
}
