//! Per-frame trace records and their jsonl / csv encodings.

use std::io::Write;

use serde::Serialize;
use sltk_core::{Coord3D, Mode, StepReport};

use crate::error::{Error, Result};

/// Column order shared by both formats.
pub const FIELDS: [&str; 12] = [
    "frame",
    "t_ms",
    "modes",
    "movement",
    "compensation",
    "centroid",
    "area",
    "inner",
    "iters",
    "x",
    "y",
    "z",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub frame: usize,
    pub t_ms: u64,
    pub modes: Vec<&'static str>,
    pub movement: Option<u64>,
    pub compensation: Option<u8>,
    pub centroid: Option<[i32; 2]>,
    pub area: Option<f64>,
    pub inner: Option<[i32; 2]>,
    pub iters: Option<usize>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<f64>,
    /// Unsmoothed coordinates; kept for analysis, not emitted.
    #[serde(skip)]
    pub raw: Option<Coord3D>,
}

impl TraceRecord {
    pub fn from_report(frame: usize, report: &StepReport) -> Self {
        let e = report.estimate;
        Self {
            frame,
            t_ms: report.timestamp_ms,
            modes: report.modes.iter().map(|m| m.name()).collect(),
            movement: report.movement,
            compensation: report.compensation,
            centroid: e.map(|e| [e.centroid.x, e.centroid.y]),
            area: e.map(|e| e.area),
            inner: e.map(|e| [e.inner.x, e.inner.y]),
            iters: e.map(|e| e.iterations),
            x: report.output.map(|c| c.x),
            y: report.output.map(|c| c.y),
            z: report.output.map(|c| c.z),
            raw: report.raw,
        }
    }

    pub fn final_mode(&self) -> Option<Mode> {
        self.modes.last().and_then(|m| m.parse().ok())
    }

    fn csv_row(&self) -> [String; 12] {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map_or_else(String::new, |v| v.to_string())
        }
        let point = |p: Option<[i32; 2]>| opt(p.map(|[x, y]| format!("{x} {y}")));
        [
            self.frame.to_string(),
            self.t_ms.to_string(),
            self.modes.join(">"),
            opt(self.movement),
            opt(self.compensation),
            point(self.centroid),
            opt(self.area),
            point(self.inner),
            opt(self.iters),
            opt(self.x),
            opt(self.y),
            opt(self.z),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

enum Sink<W: Write> {
    Jsonl(W),
    Csv(Box<csv::Writer<W>>),
}

/// Writes one line per record. CSV output has no header row unless asked
/// for with [`TraceWriter::with_header`].
pub struct TraceWriter<W: Write> {
    sink: Sink<W>,
}

fn output_error(e: impl Into<std::io::Error>) -> Error {
    Error::Io {
        path: "<trace output>".into(),
        source: e.into(),
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(writer: W, format: Format) -> Self {
        let sink = match format {
            Format::Jsonl => Sink::Jsonl(writer),
            Format::Csv => Sink::Csv(Box::new(
                csv::WriterBuilder::new()
                    .has_headers(false)
                    .from_writer(writer),
            )),
        };
        Self { sink }
    }

    /// Like [`TraceWriter::new`], but CSV output starts with the column names.
    pub fn with_header(writer: W, format: Format) -> Result<Self> {
        let mut w = Self::new(writer, format);
        if let Sink::Csv(c) = &mut w.sink {
            c.write_record(FIELDS).map_err(output_error)?;
        }
        Ok(w)
    }

    pub fn write(&mut self, record: &TraceRecord) -> Result<()> {
        match &mut self.sink {
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, record).map_err(output_error)?;
                w.write_all(b"\n").map_err(output_error)
            }
            Sink::Csv(w) => w.write_record(record.csv_row()).map_err(output_error),
        }
    }

    pub fn finish(self) -> Result<W> {
        match self.sink {
            Sink::Jsonl(mut w) => {
                w.flush().map_err(output_error)?;
                Ok(w)
            }
            Sink::Csv(w) => w.into_inner().map_err(|e| output_error(e.into_error())),
        }
    }
}

/// Encodes `records` into a byte buffer.
pub fn emit(records: &[TraceRecord], format: Format) -> Result<Vec<u8>> {
    let mut w = TraceWriter::new(Vec::new(), format);
    for r in records {
        w.write(r)?;
    }
    w.finish()
}
