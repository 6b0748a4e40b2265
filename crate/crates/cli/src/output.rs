use std::io::Write;
use std::path::{Path, PathBuf};

use csp2ccs::explore::Verdict;
use thiserror::Error;

pub const EXIT_FALSE: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Failure {
    pub fn input(msg: impl std::fmt::Display) -> Failure {
        Failure::Input(msg.to_string())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Failure {
        Failure::Io { path: path.to_path_buf(), source }
    }
}

/// Exit status for a set of verdicts: any false gives 1, otherwise any
/// inconclusive gives 2.
pub fn exit_status(verdicts: impl IntoIterator<Item = Verdict>) -> u8 {
    let mut code = 0;
    for v in verdicts {
        match v {
            Verdict::False => return EXIT_FALSE,
            Verdict::Inconclusive => code = EXIT_INCONCLUSIVE,
            Verdict::True => {}
        }
    }
    code
}

/// Replaces `path` with `contents` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(contents).map_err(|e| Failure::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_vec_pretty(value).expect("reports serialize");
    text.push(b'\n');
    write_atomic(path, &text)
}
