//! Output sinks. Files are written to a sibling temp path and renamed so a
//! failed run never leaves a partial file behind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use dfma::Result;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Where the primary artifact of a subcommand goes, plus the human summary.
pub struct Sink {
    pub out: Option<PathBuf>,
    pub quiet: bool,
}

impl Sink {
    /// Writes the artifact to `--out`, or to stdout when no path was given.
    pub fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) if text.ends_with('\n') => write_atomic(p, text.as_bytes()),
            Some(p) => write_atomic(p, format!("{text}\n").as_bytes()),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                if !text.ends_with('\n') {
                    stdout.write_all(b"\n")?;
                }
                Ok(())
            }
        }
    }

    /// Summary lines go to stdout when the artifact went to a file, and to
    /// stderr otherwise so piped artifacts stay clean.
    pub fn note(&self, text: &str) {
        if self.quiet {
            return;
        }
        if self.out.is_some() {
            println!("{text}");
        } else {
            eprintln!("{text}");
        }
    }
}
