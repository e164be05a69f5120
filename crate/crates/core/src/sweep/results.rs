//! Results CSV: one row per (dataset, M, T, nh, seed) cell, appended line by line.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HEADER: &str = "dataset,M,T,nh,seed,accuracy,precision,recall,f1,train_ms,predict_ms,status";
pub const STATUS_OK: &str = "ok";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub dataset: String,
    #[serde(rename = "M")]
    pub partitions: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub nh: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub train_ms: f64,
    pub predict_ms: f64,
    /// `ok`, or `error: <message>` for a failed cell.
    pub status: String,
}

/// Identifies a sweep cell.
pub type CellKey = (String, usize, usize, usize, u64);

impl SweepRecord {
    pub fn failed(dataset: &str, partitions: usize, rounds: usize, nh: usize, seed: u64, err: &Error) -> Self {
        SweepRecord {
            dataset: dataset.to_string(),
            partitions,
            rounds,
            nh,
            seed,
            accuracy: f64::NAN,
            precision: f64::NAN,
            recall: f64::NAN,
            f1: f64::NAN,
            train_ms: 0.0,
            predict_ms: 0.0,
            status: format!("error: {err}"),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    pub fn key(&self) -> CellKey {
        (self.dataset.clone(), self.partitions, self.rounds, self.nh, self.seed)
    }
}

/// Serializes one record as a single CSV line (with trailing newline).
pub fn record_line(record: &SweepRecord) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.serialize(record)
        .map_err(|e| Error::NumericFailure(format!("cannot serialize record: {e}")))?;
    w.into_inner()
        .map_err(|e| Error::NumericFailure(format!("cannot serialize record: {e}")))
}

pub fn parse_records(text: &str, source: &Path) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (idx, row) in reader.deserialize::<SweepRecord>().enumerate() {
        let record = row.map_err(|e| Error::Parse {
            path: source.to_path_buf(),
            line: idx + 2,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text, path)
}

pub fn write_records(path: &Path, records: &[SweepRecord]) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = format!("{HEADER}\n").into_bytes();
    for r in records {
        buf.extend(record_line(r)?);
    }
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// Append-only results file. Each record is written with one `write_all` and flushed.
pub struct ResultsWriter {
    file: File,
    path: std::path::PathBuf,
}

impl ResultsWriter {
    /// Opens `path` for appending, writing the header if the file is new or empty.
    ///
    /// Returns the records already present. A trailing partial line left by
    /// an interrupted run is cut off first.
    pub fn open_resumable(path: &Path) -> Result<(Self, Vec<SweepRecord>)> {
        let mut existing = Vec::new();
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let keep = match text.rfind('\n') {
                Some(pos) => pos + 1,
                None => 0,
            };
            if keep < text.len() {
                log::warn!("{}: dropping incomplete trailing line", path.display());
                let f = OpenOptions::new().write(true).open(path).map_err(|e| Error::io(path, e))?;
                f.set_len(keep as u64).map_err(|e| Error::io(path, e))?;
            }
            let valid = &text[..keep];
            if !valid.trim().is_empty() {
                let first = valid.lines().next().unwrap_or("");
                if first.trim() != HEADER {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: 1,
                        message: format!("unexpected header `{first}`"),
                    });
                }
                existing = parse_records(valid, path)?;
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let len = file.metadata().map_err(|e| Error::io(path, e))?.len();
        if len == 0 {
            file.write_all(format!("{HEADER}\n").as_bytes())
                .map_err(|e| Error::io(path, e))?;
        }
        Ok((
            ResultsWriter {
                file,
                path: path.to_path_buf(),
            },
            existing,
        ))
    }

    pub fn append(&mut self, record: &SweepRecord) -> Result<()> {
        let line = record_line(record)?;
        self.file.write_all(&line).map_err(|e| Error::io(&self.path, e))?;
        self.file.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn present_keys(records: &[SweepRecord]) -> HashSet<CellKey> {
    records.iter().map(SweepRecord::key).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(m: usize, seed: u64, acc: f64) -> SweepRecord {
        SweepRecord {
            dataset: "toy".into(),
            partitions: m,
            rounds: 2,
            nh: 5,
            seed,
            accuracy: acc,
            precision: 0.5,
            recall: 0.25,
            f1: 1.0 / 3.0,
            train_ms: 12.345,
            predict_ms: 0.5,
            status: STATUS_OK.into(),
        }
    }

    #[test]
    fn header_matches_serde_field_order() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(rec(1, 1, 0.5)).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), HEADER);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let records = vec![rec(1, 1, 0.9), rec(2, 1, 0.123_456_789_012_345_6)];
        write_records(&path, &records).unwrap();
        assert_eq!(read_records(&path).unwrap(), records);
    }

    #[test]
    fn error_messages_with_commas_survive() {
        let failed = SweepRecord::failed("toy", 3, 1, 2, 9, &Error::invalid("a, b, c"));
        let line = String::from_utf8(record_line(&failed).unwrap()).unwrap();
        let back = parse_records(&format!("{HEADER}\n{line}"), Path::new("x")).unwrap();
        assert_eq!(back[0].status, "error: invalid argument: a, b, c");
        assert!(back[0].accuracy.is_nan());
    }

    #[test]
    fn resume_cuts_partial_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_records(&path, &[rec(1, 1, 0.9)]).unwrap();
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("toy,2,2,5");
        fs::write(&path, &text).unwrap();
        let (mut w, existing) = ResultsWriter::open_resumable(&path).unwrap();
        assert_eq!(existing.len(), 1);
        w.append(&rec(2, 1, 0.8)).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, vec![rec(1, 1, 0.9), rec(2, 1, 0.8)]);
    }

    #[test]
    fn foreign_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(ResultsWriter::open_resumable(&path).is_err());
    }
}
