use std::io::Write;
use std::path::Path;

use super::{label_value, parse_number, DatasetReader, RawTable, ReadOptions};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::registry::Named;

/// Sparse `label idx:val ...` rows with 1-based indices.
pub struct LibsvmReader;

impl Named for LibsvmReader {
    fn name(&self) -> &'static str {
        "libsvm"
    }
}

impl DatasetReader for LibsvmReader {
    fn parse(&self, text: &str, source: &Path, opts: &ReadOptions) -> Result<RawTable> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: source.to_path_buf(),
            line,
            message,
        };
        let mut sparse: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut labels = Vec::new();
        let mut width = opts.num_features.unwrap_or(0);

        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let label = parse_number(tokens.next().expect("non-empty line"), source, line_no)?;
            let mut entries = Vec::new();
            for tok in tokens {
                let (i, v) = tok
                    .split_once(':')
                    .ok_or_else(|| parse_err(line_no, format!("expected idx:val, got `{tok}`")))?;
                let i: usize = i
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad feature index `{i}`")))?;
                if i == 0 {
                    return Err(parse_err(line_no, "feature indices are 1-based".into()));
                }
                if let Some(limit) = opts.num_features {
                    if i > limit {
                        return Err(Error::InconsistentDimension {
                            path: source.to_path_buf(),
                            line: line_no,
                            expected: limit,
                            actual: i,
                        });
                    }
                }
                width = width.max(i);
                entries.push((i - 1, parse_number(v, source, line_no)?));
            }
            sparse.push(entries);
            labels.push(label);
        }
        if sparse.is_empty() {
            return Err(parse_err(0, "no data rows".into()));
        }
        if width == 0 {
            return Err(parse_err(0, "no features in any row".into()));
        }
        let rows = sparse
            .into_iter()
            .map(|entries| {
                let mut row = vec![0.0; width];
                for (j, v) in entries {
                    row[j] = v;
                }
                row
            })
            .collect();
        Ok(RawTable { rows, labels })
    }

    fn write(&self, data: &Dataset, out: &mut dyn Write) -> std::io::Result<()> {
        let p = data.p();
        for (i, row) in data.features().row_iter().enumerate() {
            write!(out, "{}", label_value(data, data.labels()[i]))?;
            for (j, v) in row.iter().enumerate() {
                // The last column is always written so the width survives a reload.
                if *v != 0.0 || j + 1 == p {
                    write!(out, " {}:{v}", j + 1)?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
