//! Session-file frontend: parse a session, run its command, print the result.

mod error;
pub mod run;
pub mod session;

pub use error::{CliError, Result};
pub use run::{run, Outcome, Status};
pub use session::{parse_session, Session};

/// Parses and runs a session in one step.
pub fn execute(src: &str) -> Result<Outcome> {
    run(&parse_session(src)?)
}
