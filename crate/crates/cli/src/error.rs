use gmact_core::expr::Pos;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Syntax and name-resolution errors; these already carry a position.
    #[error(transparent)]
    Session(#[from] gmact_core::Error),
    /// A library call failed while running the command at `line:col`.
    #[error("{line}:{col}: {what}: {source}")]
    Run { line: usize, col: usize, what: String, source: gmact_core::Error },
}

impl CliError {
    pub(crate) fn run(pos: Pos, what: impl Into<String>, source: gmact_core::Error) -> Self {
        CliError::Run { line: pos.line, col: pos.col, what: what.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
