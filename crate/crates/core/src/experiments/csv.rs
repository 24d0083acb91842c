use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use super::{ResultRow, Scheme, SweepResult};
use crate::error::{Error, Result};

pub const HEADER: &str = "sweep_value,scheme,metric,mean,stderr,n_valid,n_degenerate";

#[derive(Deserialize)]
struct Record {
    sweep_value: f64,
    scheme: String,
    metric: String,
    mean: f64,
    stderr: f64,
    n_valid: usize,
    n_degenerate: usize,
}

fn to_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

/// Writes the rows in sorted order with shortest round-trip scientific floats.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> std::io::Result<()> {
    let mut sorted = result.clone();
    sorted.sort();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER.split(',')).map_err(to_io)?;
    for r in &sorted.rows {
        w.write_record([
            format!("{:e}", r.sweep_value),
            r.scheme.to_string(),
            r.metric.clone(),
            format!("{:e}", r.mean),
            format!("{:e}", r.stderr),
            r.n_valid.to_string(),
            r.n_degenerate.to_string(),
        ])
        .map_err(to_io)?;
    }
    w.flush()
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(result, file).map_err(io)
}

pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>().join(",") != HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<Record>() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let scheme = Scheme::parse(&rec.scheme).ok_or_else(|| Error::Parse {
            line: rows.len() + 2,
            msg: format!("unknown scheme {:?}", rec.scheme),
        })?;
        rows.push(ResultRow {
            sweep_value: rec.sweep_value,
            scheme,
            metric: rec.metric,
            mean: rec.mean,
            stderr: rec.stderr,
            n_valid: rec.n_valid,
            n_degenerate: rec.n_degenerate,
        });
    }
    Ok(SweepResult { rows })
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text)
}
