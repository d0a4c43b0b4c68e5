use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};

/// Rows with a fixed header, written as CSV or as a JSON array of objects.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: Option<&Path>, json: bool) -> io::Result<()> {
        let mut sink: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        };
        if json {
            let objects: Vec<Value> = self
                .rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .header
                        .iter()
                        .map(|h| h.to_string())
                        .zip(r.iter().cloned())
                        .collect();
                    Value::Object(m)
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink, &objects)?;
            writeln!(sink)?;
        } else {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r.iter().map(cell))?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
