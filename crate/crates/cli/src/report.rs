//! CSV and JSON emission. Floats are written with the shortest round-trip
//! representation, so identical runs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// JSON summary envelope written once per run.
#[derive(Serialize)]
pub struct Summary<C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: C,
    pub results: R,
}

/// Write the summary under `out_dir` and echo it to stdout.
pub fn emit_summary<C: Serialize, R: Serialize>(
    out_dir: &Path,
    name: &str,
    summary: &Summary<C, R>,
) -> std::io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let body = serde_json::to_string_pretty(summary)?;
    let path = out_dir.join(format!("{name}.json"));
    fs::write(&path, &body)?;
    println!("{body}");
    Ok(path)
}

/// Write a CSV file with the given header and float rows.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> std::io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{name}.csv"));
    let mut file = std::io::BufWriter::new(fs::File::create(&path)?);
    writeln!(file, "{header}")?;
    for row in rows {
        let line = row
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(file, "{line}")?;
    }
    file.flush()?;
    Ok(path)
}
