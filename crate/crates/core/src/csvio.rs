//! Small helpers around the `csv` crate shared by the table readers.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

/// Opens a headed CSV file, mapping a missing file to an I/O error that names the path.
pub(crate) fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file))
}

pub(crate) fn reader_from_str(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Looks up a column by header name.
pub(crate) fn column(headers: &csv::StringRecord, name: &str, source: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::parse(source, 1, format!("missing column `{name}`")))
}

pub(crate) fn field(rec: &csv::StringRecord, idx: usize) -> &str {
    rec.get(idx).unwrap_or("")
}

/// Parses a numeric field; `line` is the 1-based line in the file.
pub(crate) fn parse_f64(
    rec: &csv::StringRecord,
    idx: usize,
    source: &Path,
    line: usize,
) -> Result<f64> {
    let raw = field(rec, idx);
    raw.parse::<f64>()
        .map_err(|_| Error::parse(source, line, format!("`{raw}` is not a number")))
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_string(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
