//! Output directories and tabular exports.
//!
//! Every subcommand writes into a hidden staging directory next to the
//! requested output and renames it into place only after all files are
//! written, so a failed run leaves nothing behind. An existing output
//! directory is replaced only if an earlier run created it.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Classify, CliError, CliResult};

/// File that marks a directory as written by this tool.
pub const MARKER: &str = ".omlat-output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Staging {
    target: PathBuf,
    dir: PathBuf,
    done: bool,
}

impl Staging {
    /// Checks that `target` may be written and creates the staging directory.
    pub fn new(target: &Path) -> CliResult<Self> {
        if target.exists() {
            if !target.is_dir() {
                return Err(CliError::config(format!(
                    "{} is not a directory",
                    target.display()
                )));
            }
            let empty = fs::read_dir(target).io()?.next().is_none();
            if !empty && !target.join(MARKER).exists() {
                return Err(CliError::config(format!(
                    "{} is not empty and was not written by omlat",
                    target.display()
                )));
            }
        }
        let name = target
            .file_name()
            .ok_or_else(|| CliError::config(format!("{} has no directory name", target.display())))?
            .to_string_lossy()
            .into_owned();
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).io()?;
        let dir = parent.join(format!(".{name}.partial-{}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir).io()?;
        }
        fs::create_dir(&dir).io()?;
        fs::write(dir.join(MARKER), "").io()?;
        Ok(Self {
            target: target.to_path_buf(),
            dir,
            done: false,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).io()?;
        text.push('\n');
        fs::write(self.path(name), text).io()
    }

    /// Moves the staged files into the target directory.
    pub fn commit(mut self) -> CliResult<()> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target).io()?;
        }
        fs::rename(&self.dir, &self.target).io()?;
        self.done = true;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.done {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

/// A column-oriented table written as CSV or as JSON
/// `{"columns": [...], "rows": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Writes `<stem>.csv` or `<stem>.json` into the staging directory.
    pub fn write(&self, staging: &Staging, stem: &str, format: Format) -> CliResult<()> {
        match format {
            Format::Json => staging.write_json(&format!("{stem}.json"), self),
            Format::Csv => {
                let mut w = csv::Writer::from_path(staging.path(&format!("{stem}.csv"))).io()?;
                w.write_record(&self.columns).io()?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell)).io()?;
                }
                w.flush().io()
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// A float as a JSON number, or null when it is not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
