use std::fs;
use std::path::{Path, PathBuf};

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Session files of the golden corpus, sorted by name.
pub fn corpus() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(golden_dir())
        .expect("golden directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "gmact"))
        .collect();
    files.sort();
    files
}

/// Everything a run prints, followed by its exit code.
pub fn transcript(src: &str) -> String {
    match gmact::execute(src) {
        Ok(o) => format!("{}exit {}\n", o.stdout, o.status.code()),
        Err(e) => format!("error: {e}\nexit 1\n"),
    }
}

pub fn expected_path(session: &Path) -> PathBuf {
    session.with_extension("out")
}
