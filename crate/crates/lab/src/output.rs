//! Row sinks. Both formats are written row by row and flushed as they go,
//! so an interrupted sweep leaves a readable prefix behind for `--resume`.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::sweep::SweepRow;
use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

enum Inner {
    Csv(Box<csv::Writer<Box<dyn Write>>>),
    Json { out: Box<dyn Write>, first: bool },
}

pub struct RowSink {
    inner: Inner,
}

impl RowSink {
    pub fn new(out: Box<dyn Write>, format: Format) -> Self {
        Self::with_header(out, format, true)
    }

    fn with_header(out: Box<dyn Write>, format: Format, header: bool) -> Self {
        let inner = match format {
            Format::Csv => Inner::Csv(Box::new(csv::WriterBuilder::new().has_headers(header).from_writer(out))),
            Format::Json => Inner::Json { out, first: true },
        };
        RowSink { inner }
    }

    /// Opens `path` for writing. With `resume`, rows already in the file are
    /// kept and returned; new rows go after them.
    pub fn create(path: &Path, format: Format, resume: bool) -> Result<(Self, Vec<SweepRow>), LabError> {
        let done = if resume && path.exists() {
            read_completed(path, format)?
        } else {
            Vec::new()
        };
        let mut sink = match format {
            Format::Csv if !done.is_empty() => {
                let file = OpenOptions::new().append(true).open(path)?;
                Self::with_header(Box::new(BufWriter::new(file)), format, false)
            }
            _ => Self::new(Box::new(BufWriter::new(File::create(path)?)), format),
        };
        // A JSON array cannot be appended to in place, so it is rewritten.
        if format == Format::Json {
            for row in &done {
                sink.write(row)?;
            }
        }
        Ok((sink, done))
    }

    pub fn write(&mut self, row: &SweepRow) -> Result<(), LabError> {
        match &mut self.inner {
            Inner::Csv(w) => {
                w.serialize(row)?;
                w.flush()?;
            }
            Inner::Json { out, first } => {
                out.write_all(if *first { b"[\n" } else { b",\n" })?;
                serde_json::to_writer(&mut *out, row)?;
                out.flush()?;
                *first = false;
            }
        }
        Ok(())
    }

    /// Closes the JSON array. Dropping without finishing leaves a truncated
    /// array that [`read_completed`] still accepts.
    pub fn finish(mut self) -> Result<(), LabError> {
        match &mut self.inner {
            Inner::Csv(w) => w.flush()?,
            Inner::Json { out, first } => {
                out.write_all(if *first { b"[]\n" } else { b"\n]\n" })?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

/// Rows already present in an output file. A JSON file cut off mid-row
/// yields the rows before the cut.
pub fn read_completed(path: &Path, format: Format) -> Result<Vec<SweepRow>, LabError> {
    match format {
        Format::Csv => {
            let mut reader = csv::Reader::from_path(path)?;
            Ok(reader.deserialize().collect::<Result<_, _>>()?)
        }
        Format::Json => {
            let text = std::fs::read_to_string(path)?;
            let body = text.trim().trim_start_matches('[').trim_end_matches(']');
            let mut rows = Vec::new();
            for item in serde_json::Deserializer::from_str(&body.replace(",\n", "\n")).into_iter::<SweepRow>() {
                match item {
                    Ok(row) => rows.push(row),
                    Err(e) if e.is_eof() => break,
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RowEngine;

    fn row(p: f64) -> SweepRow {
        SweepRow {
            n: 10,
            k: 2,
            p,
            q: 0.1,
            c: 0.3,
            trials: 4,
            successes: 3,
            proportion: 0.75,
            ci_low: 0.3,
            ci_high: 0.95,
            mean_runtime_ms: 0.0,
            engine: RowEngine::Constructive,
        }
    }

    #[test]
    fn csv_header_follows_field_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("o.csv");
        let (mut sink, _) = RowSink::create(&path, Format::Csv, false).unwrap();
        sink.write(&row(0.1)).unwrap();
        sink.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "n,k,p,q,c,trials,successes,proportion,ci_low,ci_high,mean_runtime_ms,engine"
        );
        assert!(text.lines().nth(1).unwrap().ends_with(",constructive"));
    }

    #[test]
    fn resume_keeps_rows_in_both_formats() {
        for format in [Format::Csv, Format::Json] {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("o");
            let (mut sink, done) = RowSink::create(&path, format, true).unwrap();
            assert!(done.is_empty());
            sink.write(&row(0.1)).unwrap();
            sink.finish().unwrap();
            let (mut sink, done) = RowSink::create(&path, format, true).unwrap();
            assert_eq!(done, vec![row(0.1)]);
            sink.write(&row(0.2)).unwrap();
            sink.finish().unwrap();
            assert_eq!(read_completed(&path, format).unwrap(), vec![row(0.1), row(0.2)]);
        }
    }

    #[test]
    fn json_is_an_array_of_objects() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("o.json");
        let (mut sink, _) = RowSink::create(&path, Format::Json, false).unwrap();
        sink.write(&row(0.1)).unwrap();
        sink.write(&row(0.2)).unwrap();
        sink.finish().unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert_eq!(v[1]["engine"], "constructive");
    }

    #[test]
    fn truncated_json_yields_prefix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("o.json");
        let (mut sink, _) = RowSink::create(&path, Format::Json, false).unwrap();
        sink.write(&row(0.1)).unwrap();
        drop(sink);
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str(",\n{\"n\": 1");
        std::fs::write(&path, text).unwrap();
        assert_eq!(read_completed(&path, Format::Json).unwrap(), vec![row(0.1)]);
    }
}
