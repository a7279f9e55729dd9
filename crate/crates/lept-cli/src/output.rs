//! Deterministic file emission: CSV/JSON data tables, run metadata and a
//! plot manifest.
//!
//! Every byte written here is a pure function of the resolved
//! configuration — no timestamps, no absolute paths, no locale.  Floats
//! go out as `{:.16e}` (17 significant digits) in CSV and as shortest
//! round-trip decimals in JSON; complex values split into `re_`/`im_`
//! columns in CSV and appear as `[re, im]` pairs in JSON.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Column declaration; complex columns expand to two CSV fields.
#[derive(Clone, Copy)]
pub enum Field {
    Int(&'static str),
    Real(&'static str),
    Complex(&'static str),
    Text(&'static str),
}

impl Field {
    fn name(&self) -> &'static str {
        match self {
            Field::Int(n) | Field::Real(n) | Field::Complex(n) | Field::Text(n) => n,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(Complex64),
    Text(String),
}

pub struct Table {
    pub name: &'static str,
    pub fields: Vec<Field>,
    pub rows: Vec<Vec<Cell>>,
}

/// Hints for rendering one emitted file with any plotting tool.
pub struct PlotSpec {
    pub kind: &'static str,
    pub x: &'static str,
    pub y: &'static str,
    pub series_key: Option<&'static str>,
    pub title: String,
}

pub struct Emitter {
    dir: PathBuf,
    format: Format,
    warnings: Vec<String>,
    files: Vec<String>,
    plots: Vec<Value>,
}

impl Emitter {
    pub fn new(dir: PathBuf, format: Format) -> Result<Emitter> {
        fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Emitter {
            dir,
            format,
            warnings: Vec::new(),
            files: Vec::new(),
            plots: Vec::new(),
        })
    }

    /// Record a soft failure: mirrored to stderr immediately and kept for
    /// the machine-readable metadata.
    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    pub fn emit(&mut self, table: &Table, plot: Option<PlotSpec>) -> Result<()> {
        let file_name = format!("{}.{}", table.name, self.format.name());
        let body = match self.format {
            Format::Csv => render_csv(table),
            Format::Json => render_json(table)?,
        };
        let path = self.dir.join(&file_name);
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        if let Some(p) = plot {
            self.plots.push(json!({
                "file": file_name,
                "kind": p.kind,
                "x": p.x,
                "y": p.y,
                "series_key": p.series_key,
                "title": p.title,
            }));
        }
        self.files.push(file_name);
        Ok(())
    }

    /// Write `metadata.json` (and the plot manifest when any table carried
    /// a plot hint) and consume the emitter.
    pub fn finish(mut self, command: &str, results: Value) -> Result<()> {
        if !self.plots.is_empty() {
            let manifest = json!({ "plots": std::mem::take(&mut self.plots) });
            let path = self.dir.join("plot_manifest.json");
            fs::write(&path, pretty(&manifest)?)
                .with_context(|| format!("cannot write {}", path.display()))?;
            self.files.push("plot_manifest.json".into());
        }
        let mut meta = Map::new();
        meta.insert("command".into(), Value::from(command));
        meta.insert("files".into(), Value::from(self.files));
        meta.insert("results".into(), results);
        meta.insert("warnings".into(), Value::from(self.warnings));
        let path = self.dir.join("metadata.json");
        fs::write(&path, pretty(&Value::Object(meta))?)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

fn pretty(value: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = Vec::new();
    for field in &table.fields {
        match field {
            Field::Complex(name) => {
                header.push(format!("re_{name}"));
                header.push(format!("im_{name}"));
            }
            f => header.push(f.name().to_string()),
        }
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &table.rows {
        debug_assert_eq!(row.len(), table.fields.len());
        let mut cells: Vec<String> = Vec::new();
        for cell in row {
            match cell {
                Cell::Int(v) => cells.push(format!("{v}")),
                Cell::Real(v) => cells.push(format!("{v:.16e}")),
                Cell::Complex(z) => {
                    cells.push(format!("{:.16e}", z.re));
                    cells.push(format!("{:.16e}", z.im));
                }
                Cell::Text(s) => {
                    debug_assert!(!s.contains(',') && !s.contains('\n'));
                    cells.push(s.clone());
                }
            }
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render_json(table: &Table) -> Result<String> {
    let mut rows = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let mut obj = Map::new();
        for (field, cell) in table.fields.iter().zip(row) {
            let value = match cell {
                Cell::Int(v) => Value::from(*v),
                Cell::Real(v) => Value::from(*v),
                Cell::Complex(z) => json!([z.re, z.im]),
                Cell::Text(s) => Value::from(s.as_str()),
            };
            obj.insert(field.name().to_string(), value);
        }
        rows.push(Value::Object(obj));
    }
    pretty(&Value::Array(rows))
}

/// JSON form of a complex number used in metadata blocks.
pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> Table {
        Table {
            name: "sample",
            fields: vec![
                Field::Int("branch"),
                Field::Real("k"),
                Field::Complex("lambda"),
                Field::Text("status"),
            ],
            rows: vec![vec![
                Cell::Int(3),
                Cell::Real(0.5),
                Cell::Complex(Complex64::new(-0.25, 1.0 / 3.0)),
                Cell::Text("ok".into()),
            ]],
        }
    }

    #[test]
    fn csv_splits_complex_columns_and_keeps_full_precision() {
        let text = render_csv(&sample_table());
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "branch,k,re_lambda,im_lambda,status");
        let row = lines.next().unwrap();
        assert_eq!(
            row,
            "3,5.0000000000000000e-1,-2.5000000000000000e-1,3.3333333333333331e-1,ok"
        );
        // Round-trips to the exact double.
        let im: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(im, 1.0 / 3.0);
    }

    #[test]
    fn json_mirrors_fields_with_complex_pairs() {
        let text = render_json(&sample_table()).unwrap();
        let rows: Value = serde_json::from_str(&text).unwrap();
        let row = &rows.as_array().unwrap()[0];
        assert_eq!(row["branch"], json!(3));
        assert_eq!(row["lambda"], json!([-0.25, 1.0 / 3.0]));
        assert_eq!(row["status"], json!("ok"));
    }
}
