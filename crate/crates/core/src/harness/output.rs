//! On-disk artefacts of a run: tick CSV, handover CSV and the TOML summary.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::engine::{RunOutput, SwitchSample, TickRecord};
use super::metrics::RunSummary;
use crate::control::HandoverEvent;
use crate::{Error, Result};

pub const TICKS_FILE: &str = "ticks.csv";
pub const HANDOVERS_FILE: &str = "handovers.csv";
pub const SUMMARY_FILE: &str = "summary.toml";

fn write_csv<W: Write, T: serde::Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_ticks<W: Write>(w: W, records: &[TickRecord]) -> Result<()> {
    write_csv(w, records)
}

pub fn ticks_csv_bytes(records: &[TickRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_ticks(&mut buf, records)?;
    Ok(buf)
}

pub fn write_handovers<W: Write>(w: W, events: &[HandoverEvent]) -> Result<()> {
    if events.is_empty() {
        // csv only emits headers alongside the first record
        let mut w = w;
        writeln!(w, "time_ms,from,to")?;
        return Ok(());
    }
    write_csv(w, events)
}

pub fn write_switch_samples<W: Write>(w: W, samples: &[SwitchSample]) -> Result<()> {
    write_csv(w, samples)
}

pub fn read_ticks(path: impl AsRef<Path>) -> Result<Vec<TickRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_summary(path: impl AsRef<Path>, summary: &RunSummary) -> Result<()> {
    fs::write(path, toml::to_string(summary)?)?;
    Ok(())
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<RunSummary> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config("summary", format!("{}: {e}", path.display())))?;
    Ok(toml::from_str(&text)?)
}

/// Writes `ticks.csv`, `handovers.csv` and `summary.toml` into `dir`.
pub fn write_run(dir: impl AsRef<Path>, out: &RunOutput) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_ticks(fs::File::create(dir.join(TICKS_FILE))?, &out.records)?;
    write_handovers(fs::File::create(dir.join(HANDOVERS_FILE))?, &out.handovers)?;
    write_summary(dir.join(SUMMARY_FILE), &out.summary)
}

pub fn write_comparison(path: impl AsRef<Path>, report: &super::compare::ComparisonReport) -> Result<()> {
    fs::write(path, toml::to_string(report)?)?;
    Ok(())
}
