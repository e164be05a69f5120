use std::io::Write;
use std::path::Path;

use super::{label_value, parse_number, DatasetReader, Delimiter, RawTable, ReadOptions};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::registry::Named;

/// Dense delimited text, one row per line, label in the last column by default.
pub struct CsvReader;

impl Named for CsvReader {
    fn name(&self) -> &'static str {
        "csv"
    }
}

impl DatasetReader for CsvReader {
    fn parse(&self, text: &str, source: &Path, opts: &ReadOptions) -> Result<RawTable> {
        let mut table = RawTable::default();
        let mut width: Option<usize> = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if idx == 0 && opts.header {
                continue;
            }
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = match opts.delimiter {
                Delimiter::Comma => line.split(',').collect(),
                Delimiter::Char(c) => line.split(c).collect(),
                Delimiter::Whitespace => line.split_whitespace().collect(),
            };
            match width {
                None => width = Some(fields.len()),
                Some(w) if w != fields.len() => {
                    return Err(Error::InconsistentDimension {
                        path: source.to_path_buf(),
                        line: line_no,
                        expected: w.saturating_sub(1),
                        actual: fields.len().saturating_sub(1),
                    })
                }
                Some(_) => {}
            }
            if fields.len() < 2 {
                return Err(Error::Parse {
                    path: source.to_path_buf(),
                    line: line_no,
                    message: "need at least one feature and a label".into(),
                });
            }
            let label_col = opts.label_col.unwrap_or(fields.len() - 1);
            if label_col >= fields.len() {
                return Err(Error::Parse {
                    path: source.to_path_buf(),
                    line: line_no,
                    message: format!("label column {label_col} out of range for {} fields", fields.len()),
                });
            }
            let mut row = Vec::with_capacity(fields.len() - 1);
            for (j, f) in fields.iter().enumerate() {
                let v = parse_number(f, source, line_no)?;
                if j == label_col {
                    table.labels.push(v);
                } else {
                    row.push(v);
                }
            }
            table.rows.push(row);
        }
        if table.rows.is_empty() {
            return Err(Error::Parse {
                path: source.to_path_buf(),
                line: 0,
                message: "no data rows".into(),
            });
        }
        Ok(table)
    }

    fn write(&self, data: &Dataset, out: &mut dyn Write) -> std::io::Result<()> {
        for (i, row) in data.features().row_iter().enumerate() {
            for v in row.iter() {
                write!(out, "{v},")?;
            }
            writeln!(out, "{}", label_value(data, data.labels()[i]))?;
        }
        Ok(())
    }
}
