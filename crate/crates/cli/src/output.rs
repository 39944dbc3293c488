use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;
use tightframe::frames::FrameMatrix;

use crate::CliError;

/// One header row of column labels, then one row per coordinate with 17
/// significant digits.
pub fn frame_to_csv(f: &FrameMatrix) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("row").chain(f.col_index.iter().map(String::as_str)).collect();
    w.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    for (label, row) in f.row_index.iter().zip(&f.entries) {
        let mut record = vec![label.clone()];
        record.extend(row.iter().map(|v| format!("{:.16e}", v.to_f64())));
        w.write_record(&record).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Writes through a temporary file in the target directory, then renames it.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
