//! Output files. Every file carries the tool version, the command and the
//! resolved configuration; nothing time- or host-dependent is written.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A table of numbers with named columns.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Key/value remarks written as header comments or a JSON object.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }
}

pub struct Output {
    dir: PathBuf,
    format: Format,
    command: String,
    config: RunConfig,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(
        dir: &Path,
        format: Format,
        command: &str,
        config: RunConfig,
    ) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            command: command.to_string(),
            config,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn config_toml(&self) -> String {
        toml::to_string(&self.config).unwrap_or_else(|e| format!("# unserializable config: {e}\n"))
    }

    fn config_json(&self) -> serde_json::Value {
        // Through TOML so that unset fields are omitted, as in CSV headers.
        toml::Value::try_from(&self.config)
            .ok()
            .and_then(|v| serde_json::to_value(v).ok())
            .unwrap_or(serde_json::Value::Null)
    }

    fn create(&mut self, file: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        let path = self.dir.join(file);
        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
        self.written.push(path.clone());
        Ok((path, BufWriter::new(f)))
    }

    /// Write `table` as `<stem>.csv` or `<stem>.json` depending on the format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<PathBuf, CliError> {
        let file = format!("{stem}.{}", self.format.extension());
        match self.format {
            Format::Csv => {
                let header = self.header_lines();
                let (path, mut w) = self.create(&file)?;
                let res = (|| -> std::io::Result<()> {
                    w.write_all(header.as_bytes())?;
                    for (k, v) in &table.notes {
                        writeln!(w, "# {k}: {v}")?;
                    }
                    writeln!(w, "{}", table.columns.join(","))?;
                    for row in &table.rows {
                        let cells: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
                        writeln!(w, "{}", cells.join(","))?;
                    }
                    w.flush()
                })();
                res.map_err(|e| io_err(&path, e))?;
                Ok(path)
            }
            Format::Json => {
                let notes: serde_json::Map<String, serde_json::Value> = table
                    .notes
                    .iter()
                    .map(|(k, v)| (k.clone(), json!(v)))
                    .collect();
                let value = json!({
                    "columns": table.columns,
                    "rows": table.rows,
                    "notes": notes,
                });
                self.json_file(&file, value)
            }
        }
    }

    /// Write a structured result as `<stem>.json` regardless of the format.
    pub fn json<T: Serialize>(&mut self, stem: &str, result: &T) -> Result<PathBuf, CliError> {
        let value = serde_json::to_value(result).map_err(|e| CliError::Core(e.into()))?;
        self.json_file(&format!("{stem}.json"), value)
    }

    fn json_file(&mut self, file: &str, result: serde_json::Value) -> Result<PathBuf, CliError> {
        let doc = json!({
            "version": VERSION,
            "command": self.command,
            "config": self.config_json(),
            "result": result,
        });
        let (path, mut w) = self.create(file)?;
        let res = (|| -> std::io::Result<()> {
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
            w.flush()
        })();
        res.map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    fn header_lines(&self) -> String {
        let mut s = format!(
            "# bic-entangle {VERSION}\n# command: {}\n# config:\n",
            self.command
        );
        for line in self.config_toml().lines() {
            if line.is_empty() {
                s.push_str("#\n");
            } else {
                s.push_str("#   ");
                s.push_str(line);
                s.push('\n');
            }
        }
        s
    }
}

pub fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}
