use indexmap::IndexMap;
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    /// `None` is written as an empty CSV cell and as JSON `null`.
    Integer(Vec<Option<i64>>),
    Text(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Real(v) => v.len(),
            Column::Complex(v) => v.len(),
            Column::Integer(v) => v.len(),
            Column::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Column::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<&[Option<i64>]> {
        match self {
            Column::Integer(v) => Some(v),
            _ => None,
        }
    }

    // flattened (header, cell) view shared by CSV and JSON output
    fn flat(&self, name: &str) -> Vec<(String, Vec<Value>)> {
        let num = |x: f64| json!(x);
        match self {
            Column::Real(v) => vec![(name.to_string(), v.iter().map(|&x| num(x)).collect())],
            Column::Complex(v) => vec![
                (format!("re_{name}"), v.iter().map(|z| num(z.re)).collect()),
                (format!("im_{name}"), v.iter().map(|z| num(z.im)).collect()),
            ],
            Column::Integer(v) => vec![(name.to_string(), v.iter().map(|x| json!(x)).collect())],
            Column::Text(v) => vec![(name.to_string(), v.iter().map(|x| json!(x)).collect())],
        }
    }
}

/// Named, equal-length columns plus free-form metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    columns: IndexMap<String, Column>,
    pub metadata: Map<String, Value>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> usize {
        self.columns.values().next().map_or(0, Column::len)
    }

    pub fn push_column(&mut self, name: impl Into<String>, column: Column) -> Result<()> {
        let name = name.into();
        if !self.columns.is_empty() && column.len() != self.rows() {
            return Err(Error::Length {
                what: "result column",
                expected: self.rows(),
                got: column.len(),
            });
        }
        self.columns.insert(name, column);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.get(name)
    }

    pub fn real(&self, name: &str) -> Option<&[f64]> {
        self.column(name).and_then(Column::as_real)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &Column)> {
        self.columns.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Rows whose real column `name` equals `value`.
    pub fn rows_where(&self, name: &str, value: f64) -> Vec<usize> {
        self.real(name)
            .map(|v| (0..v.len()).filter(|&i| v[i] == value).collect())
            .unwrap_or_default()
    }

    fn flat(&self) -> Vec<(String, Vec<Value>)> {
        self.columns.iter().flat_map(|(k, c)| c.flat(k)).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let flat = self.flat();
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(flat.iter().map(|(h, _)| h.as_str()))?;
        for r in 0..self.rows() {
            w.write_record(flat.iter().map(|(_, cells)| cell_text(&cells[r])))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let columns: Map<String, Value> = self
            .flat()
            .into_iter()
            .map(|(h, v)| (h, Value::Array(v)))
            .collect();
        json!({ "metadata": self.metadata, "columns": columns })
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.to_json())?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        self.write_csv(std::fs::File::create(&csv_path)?)?;
        self.write_json(std::fs::File::create(&json_path)?)?;
        Ok((csv_path, json_path))
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new();
        t.push_column("n", Column::Integer(vec![Some(8), Some(16)]))
            .unwrap();
        t.push_column("err", Column::Real(vec![0.5, 0.25])).unwrap();
        t.push_column(
            "alpha",
            Column::Complex(vec![Complex64::new(1.0, -2.0), Complex64::new(0.0, 3.0)]),
        )
        .unwrap();
        t.push_column("l", Column::Integer(vec![None, Some(3)]))
            .unwrap();
        t
    }

    #[test]
    fn csv_splits_complex_columns() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,err,re_alpha,im_alpha,l");
        assert_eq!(lines[1], "8,5e-1,1e0,-2e0,");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn csv_round_trips_reals_exactly() {
        let mut t = ResultTable::new();
        let xs = vec![0.1 + 0.2, 1.0 / 3.0, 6.02e23, -1e-300];
        t.push_column("x", Column::Real(xs.clone())).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let mut rdr = csv::Reader::from_reader(buf.as_slice());
        let back: Vec<f64> = rdr
            .records()
            .map(|r| r.unwrap()[0].parse().unwrap())
            .collect();
        assert_eq!(back, xs);
    }

    #[test]
    fn json_shape() {
        let mut t = sample();
        t.metadata.insert("k".into(), json!(1));
        let v = t.to_json();
        assert_eq!(v["metadata"]["k"], 1);
        assert_eq!(v["columns"]["im_alpha"][1], 3.0);
        assert!(v["columns"]["l"][0].is_null());
    }

    #[test]
    fn rejects_ragged_columns() {
        let mut t = sample();
        assert!(t.push_column("bad", Column::Real(vec![1.0])).is_err());
    }
}
