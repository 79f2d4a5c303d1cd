//! Shared text-format helpers: TOML parsing with line numbers and CSV emission.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;

use crate::{Error, Result};

/// 1-based line of byte `offset` in `text`.
pub fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

pub fn parse_toml<T: DeserializeOwned>(text: &str, file: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => Error::Validation {
            file: file.to_string(),
            line: line_at(text, span.start),
            message: e.message().to_string(),
        },
        None => Error::Parse {
            file: file.to_string(),
            message: e.to_string(),
        },
    })
}

/// Column-oriented CSV table; numbers use the shortest round-trip representation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<CsvValue>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CsvValue {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for CsvValue {
    fn from(v: f64) -> Self {
        CsvValue::Float(v)
    }
}

impl From<Option<f64>> for CsvValue {
    fn from(v: Option<f64>) -> Self {
        v.map_or(CsvValue::Missing, CsvValue::Float)
    }
}

impl From<usize> for CsvValue {
    fn from(v: usize) -> Self {
        CsvValue::Int(v as i64)
    }
}

impl From<bool> for CsvValue {
    fn from(v: bool) -> Self {
        CsvValue::Bool(v)
    }
}

impl From<&str> for CsvValue {
    fn from(v: &str) -> Self {
        CsvValue::Text(v.to_string())
    }
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<CsvValue>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Number of data rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Header line plus one line per row, newline-terminated.
    pub fn render(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match v {
                    CsvValue::Float(x) => write!(out, "{x:?}").unwrap(),
                    CsvValue::Int(x) => write!(out, "{x}").unwrap(),
                    CsvValue::Bool(b) => out.push_str(if *b { "1" } else { "0" }),
                    CsvValue::Text(s) => out.push_str(s),
                    CsvValue::Missing => {}
                }
            }
            out.push('\n');
        }
        out
    }
}
