use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::Format;

/// Numeric table with named columns.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Fixed 17-significant-digit scientific notation.
pub fn fmt_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(table: &Table, w: &mut dyn Write) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&table.columns)?;
    for row in &table.rows {
        out.write_record(row.iter().map(|&v| fmt_number(v)))?;
    }
    out.flush()
}

fn write_json(
    table: &Table,
    config: &impl Serialize,
    summary: Option<Value>,
    w: &mut dyn Write,
) -> io::Result<()> {
    let mut obj = Map::new();
    obj.insert("config".into(), serde_json::to_value(config)?);
    obj.insert("columns".into(), serde_json::to_value(&table.columns)?);
    obj.insert("rows".into(), serde_json::to_value(&table.rows)?);
    if let Some(s) = summary {
        obj.insert("summary".into(), s);
    }
    serde_json::to_writer_pretty(&mut *w, &Value::Object(obj))?;
    writeln!(w)
}

/// Writes the table to `path` or standard output. For CSV the summary goes
/// to standard error, one `key: value` line per entry.
pub fn emit(
    table: &Table,
    config: &impl Serialize,
    summary: Option<Value>,
    format: Format,
    path: Option<&Path>,
) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => {
            write_csv(table, &mut sink)?;
            if let Some(Value::Object(s)) = summary {
                for (k, v) in s {
                    eprintln!("{k}: {v}");
                }
            }
        }
        Format::Json => write_json(table, config, summary, &mut sink)?,
    }
    sink.flush()
}
