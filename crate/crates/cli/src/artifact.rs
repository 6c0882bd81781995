//! Tabular outputs and their byte-exact rendering.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::plot;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    Empty,
}

impl Cell {
    /// Floats use the shortest decimal that parses back to the same bits.
    pub fn render(&self) -> String {
        match self {
            Cell::F(x) => format_float(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::F(x) => Some(*x),
            Cell::I(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::I(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::S(if b { "true" } else { "false" }.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Which columns to draw when plotting is requested.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub ys: Vec<String>,
    pub log_x: bool,
    pub x_label: String,
    pub y_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub description: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, Value>,
    pub notes: Vec<String>,
    pub plot: Option<PlotSpec>,
}

#[derive(Serialize)]
struct Meta<'a> {
    artifact: &'a str,
    description: &'a str,
    config_hash: &'a str,
    columns: &'a [String],
    rows: usize,
    summary: &'a BTreeMap<String, Value>,
    notes: &'a [String],
}

impl Artifact {
    pub fn new(name: impl Into<String>, description: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            headers: headers.iter().map(|h| (*h).to_owned()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            notes: Vec::new(),
            plot: None,
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("summary value serialises");
        self.summary.insert(key.to_owned(), v);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn render_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn render_meta(&self, config_hash: &str) -> String {
        let meta = Meta {
            artifact: &self.name,
            description: &self.description,
            config_hash,
            columns: &self.headers,
            rows: self.rows.len(),
            summary: &self.summary,
            notes: &self.notes,
        };
        let mut s = serde_json::to_string_pretty(&meta).expect("metadata serialises");
        s.push('\n');
        s
    }

    pub fn render_plot(&self, config_hash: &str) -> Option<String> {
        self.plot.as_ref().map(|spec| plot::render_svg(self, spec, config_hash))
    }
}
