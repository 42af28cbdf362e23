//! Text formatting helpers shared by every exporter.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
#[error("I/O error on {path}: {source}")]
pub struct IoError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Creates `path` and hands a buffered writer to `body`, attaching the path to any failure.
pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), IoError> {
    let wrap = |source| IoError {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(wrap)?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(wrap)?;
    w.flush().map_err(wrap)
}

/// Writes a comma-separated row of floats.
pub fn write_csv_row(w: &mut impl Write, values: impl IntoIterator<Item = f64>) -> io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        w.write_all(fmt_float(v).as_bytes())?;
    }
    w.write_all(b"\n")
}
