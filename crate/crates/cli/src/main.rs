use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Run a session file and print its result.
#[derive(Parser)]
#[command(name = "gmact", version)]
struct Args {
    /// Session file to run.
    session: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let src = match std::fs::read_to_string(&args.session) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", args.session.display());
            return ExitCode::from(1);
        }
    };
    match gmact::execute(&src) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
