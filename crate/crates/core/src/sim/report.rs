//! CSV output of simulation reports.

use std::io;
use std::path::Path;

use crate::error::{Error, Result};

use super::fmt_sig;
use super::runner::{ReportRow, SimReport};

pub const REPORT_HEADER: [&str; 8] = [
    "ebn0_db",
    "frames",
    "frame_errors",
    "fer",
    "ber",
    "avg_sorts",
    "avg_node_visits",
    "avg_pruned",
];

/// Writes `report` as CSV to any writer, floats at six significant digits.
pub fn write_report<W: io::Write>(report: &SimReport, writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_HEADER)?;
    for r in &report.rows {
        w.write_record([
            fmt_sig(r.ebn0_db),
            r.frames.to_string(),
            r.frame_errors.to_string(),
            fmt_sig(r.fer),
            fmt_sig(r.ber),
            fmt_sig(r.avg_sorts),
            fmt_sig(r.avg_node_visits),
            fmt_sig(r.avg_pruned),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report` as a CSV file.
pub fn emit_csv(report: &SimReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_report(report, io::BufWriter::new(file)).map_err(|e| Error::csv(path, e))
}

/// Reads a report written by [`emit_csv`]. Bit-error counts are recovered
/// from the BER only up to its printed precision, and wall times are zero.
pub fn parse_csv(path: &Path, dimension: usize) -> Result<SimReport> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    if header.iter().ne(REPORT_HEADER) {
        return Err(Error::Config(format!("{}: unexpected header", path.display())));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::Config(format!("{}: bad number `{}`", path.display(), &rec[i])))
        };
        let frames = f(1)? as u64;
        let ber = f(4)?;
        rows.push(ReportRow {
            ebn0_db: f(0)?,
            frames,
            frame_errors: f(2)? as u64,
            fer: f(3)?,
            bit_errors: (ber * (frames * dimension as u64) as f64).round() as u64,
            ber,
            avg_sorts: f(5)?,
            avg_node_visits: f(6)?,
            avg_pruned: f(7)?,
            wall_time: 0.0,
        });
    }
    Ok(SimReport { rows })
}
