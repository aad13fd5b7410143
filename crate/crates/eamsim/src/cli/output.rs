//! Deterministic text output.
//!
//! Numeric CSV cells carry 17 significant digits so every f64 survives a
//! round trip through the file; running a scenario twice on the same
//! config produces byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::Result;

/// Full-precision cell for a real value. Negative zero is written as
/// zero so equal values always format identically.
pub fn cell(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// One header row, then one row per record.
pub struct CsvWriter {
    header: Vec<String>,
    rows: Vec<String>,
}

impl CsvWriter {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        CsvWriter {
            header: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        let cells: Vec<String> = cells
            .into_iter()
            .map(|c| {
                let c = c.as_ref();
                assert!(
                    !c.contains(',') && !c.contains('\n'),
                    "cell {c:?} needs quoting, which this format does not use"
                );
                c.to_owned()
            })
            .collect();
        assert_eq!(
            cells.len(),
            self.header.len(),
            "row width {} does not match header width {}",
            cells.len(),
            self.header.len()
        );
        self.rows.push(cells.join(","));
    }

    pub fn numeric_row(&mut self, values: impl IntoIterator<Item = f64>) {
        let cells: Vec<String> = values.into_iter().map(cell).collect();
        self.row(cells);
    }

    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let mut text = self.header.join(",");
        text.push('\n');
        for row in &self.rows {
            text.push_str(row);
            text.push('\n');
        }
        write_text(path, &text)
    }
}

/// `key = value` run summary, keys in insertion order.
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Summary { entries: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.to_owned(), value.into()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, cell(value));
    }

    /// The parsed configuration echoed back, one entry per config key.
    pub fn push_config(&mut self, config: &super::config::ScenarioConfig) {
        for line in config.serialize().lines() {
            let (key, value) = line.split_once(" = ").expect("canonical config line");
            self.push(key, value);
        }
    }

    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        let mut text = String::new();
        for (key, value) in &self.entries {
            let _ = writeln!(text, "{key} = {value}");
        }
        write_text(path, &text)
    }
}

impl Default for Summary {
    fn default() -> Self {
        Self::new()
    }
}

fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(path.to_owned())
}
