//! CSV and JSON sidecar writers.

use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use kitaev_de::table::Table;

/// `results/x.csv` gets `results/x.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub fn write_csv(path: &Path, table: &Table) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize, R: Serialize> {
    version: &'a str,
    csv: String,
    config: &'a C,
    result: &'a R,
}

pub fn write_sidecar<C: Serialize, R: Serialize>(csv_path: &Path, config: &C, result: &R) -> io::Result<PathBuf> {
    let path = sidecar_path(csv_path);
    let name = csv_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let doc = Sidecar { version: kitaev_de::VERSION, csv: name, config, result };
    let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}
