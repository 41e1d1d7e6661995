use serde::Serialize;
use std::fmt::Write as _;

/// First line of every CSV file.
pub const CSV_HEADER: &str = "# bergman-lab csv v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Int(v) => v.to_string(),
            // shortest round-trip representation, so equal values print equal bytes
            Cell::Real(v) if v.is_nan() => "nan".into(),
            Cell::Real(v) => format!("{v:e}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Rows under a fixed column schema. The first column is always `row`,
/// naming the row kind (`detail` or a summary kind).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        let mut cols = vec!["row".to_string()];
        cols.extend(columns.iter().map(|c| c.to_string()));
        Self { columns: cols, rows: Vec::new() }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Appends a row of kind `kind`; columns not named in `cells` stay empty.
    ///
    /// # Panics
    /// On an unknown column name.
    pub fn push(&mut self, kind: &str, cells: Vec<(&str, Cell)>) {
        let mut row = vec![Cell::Empty; self.columns.len()];
        row[0] = Cell::Text(kind.to_string());
        for (name, cell) in cells {
            let idx = self.column_index(name).unwrap_or_else(|| panic!("unknown column {name}"));
            row[idx] = cell;
        }
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Rows of the given kind.
    pub fn rows_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Vec<Cell>> + 'a {
        self.rows.iter().filter(move |r| r[0].as_text() == Some(kind))
    }

    pub fn get<'a>(&self, row: &'a [Cell], column: &str) -> &'a Cell {
        &row[self.column_index(column).unwrap_or_else(|| panic!("unknown column {column}"))]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

/// Run metadata written next to the CSV. Kept out of the CSV so that the
/// table stays byte-identical across re-runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub name: String,
    pub experiment: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_s: f64,
    pub models: Vec<ModelInfo>,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub label: String,
    pub degree: Option<u32>,
    pub dropped_modes: usize,
}
