use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    /// Shortest round-trip formatting, so output bytes depend only on values.
    fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format!("{x:?}"),
            Value::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            Value::Text(s) => s.parse().ok(),
        }
    }

    pub fn as_text(&self) -> String {
        self.render()
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<Value>,
}

/// Column-oriented result table with `key: value` metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<Column>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        ResultTable {
            metadata: Vec::new(),
            columns: columns
                .iter()
                .map(|n| Column {
                    name: n.to_string(),
                    values: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        for (col, v) in self.columns.iter_mut().zip(row) {
            col.values.push(v);
        }
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key.to_string(), value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::InsufficientData(format!("table has no column `{name}`")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.columns.iter().map(|c| c.values[i].render()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let metadata = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .filter_map(|l| l.trim_start_matches('#').trim().split_once(": "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let bad = |e: csv::Error| Error::InsufficientData(format!("malformed table: {e}"));
        let header: Vec<String> = reader
            .headers()
            .map_err(bad)?
            .iter()
            .map(String::from)
            .collect();
        let mut table = ResultTable {
            metadata,
            columns: header
                .iter()
                .map(|n| Column {
                    name: n.clone(),
                    values: Vec::new(),
                })
                .collect(),
        };
        for record in reader.records() {
            let record = record.map_err(bad)?;
            table.push_row(record.iter().map(|s| Value::Text(s.to_string())).collect());
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}
