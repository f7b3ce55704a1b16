//! CSV and JSON forms of per-slot directional series.
//!
//! CSV columns are `slot,clock_time,fwd,rev`. The JSON document embeds the
//! corridor so a series can be reloaded without its config.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corridor::{format_clock, CorridorSpec, DemandSeries, LaneSchedule};
use crate::error::{Error, Result};

pub const SERIES_COLUMNS: [&str; 4] = ["slot", "clock_time", "fwd", "rev"];

/// A `(fwd, rev)` pair of per-slot counts.
pub trait DirectionalSeries: Sized {
    fn columns(&self) -> (&[u32], &[u32]);
    fn from_columns(fwd: Vec<u32>, rev: Vec<u32>) -> Result<Self>;
}

impl DirectionalSeries for DemandSeries {
    fn columns(&self) -> (&[u32], &[u32]) {
        (&self.fwd, &self.rev)
    }

    fn from_columns(fwd: Vec<u32>, rev: Vec<u32>) -> Result<Self> {
        DemandSeries::new(fwd, rev)
    }
}

impl DirectionalSeries for LaneSchedule {
    fn columns(&self) -> (&[u32], &[u32]) {
        (&self.y_fwd, &self.y_rev)
    }

    fn from_columns(fwd: Vec<u32>, rev: Vec<u32>) -> Result<Self> {
        LaneSchedule::new(fwd, rev)
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    slot: usize,
    #[allow(dead_code)]
    clock_time: String,
    fwd: u32,
    rev: u32,
}

pub fn write_series_csv<S: DirectionalSeries, W: Write>(
    series: &S,
    spec: &CorridorSpec,
    writer: W,
) -> Result<()> {
    let (fwd, rev) = series.columns();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SERIES_COLUMNS)?;
    for (t, (f, r)) in fwd.iter().zip(rev).enumerate() {
        w.write_record([
            t.to_string(),
            format_clock(spec.slot_start(t)),
            f.to_string(),
            r.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows must be numbered `0, 1, ...` in order.
pub fn read_series_csv<S: DirectionalSeries, R: Read>(reader: R) -> Result<S> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(SERIES_COLUMNS) {
        return Err(Error::Schema {
            line: 1,
            message: format!("expected header {}", SERIES_COLUMNS.join(",")),
        });
    }
    let (mut fwd, mut rev) = (Vec::new(), Vec::new());
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| Error::Schema {
            line,
            message: e.to_string(),
        })?;
        if row.slot != i {
            return Err(Error::Schema {
                line,
                message: format!("expected slot {i}, found {}", row.slot),
            });
        }
        fwd.push(row.fwd);
        rev.push(row.rev);
    }
    S::from_columns(fwd, rev)
}

pub fn save_series_csv<S: DirectionalSeries>(
    series: &S,
    spec: &CorridorSpec,
    path: impl AsRef<Path>,
) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_series_csv(series, spec, std::io::BufWriter::new(f))
}

pub fn load_series_csv<S: DirectionalSeries>(path: impl AsRef<Path>) -> Result<S> {
    read_series_csv(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument<S> {
    pub corridor: CorridorSpec,
    pub series: S,
}

impl<S: DirectionalSeries + Serialize + for<'de> Deserialize<'de>> SeriesDocument<S> {
    pub fn new(corridor: CorridorSpec, series: S) -> Result<Self> {
        let (fwd, _) = series.columns();
        if fwd.len() != corridor.horizon {
            return Err(Error::Dimension {
                what: "series",
                expected: corridor.horizon,
                found: fwd.len(),
            });
        }
        Ok(Self { corridor, series })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        doc.corridor.validate()?;
        Self::new(doc.corridor, doc.series)
    }
}
