//! Empirical CDFs and per-run summaries.

use serde::{Deserialize, Serialize};

use super::engine::TickRecord;
use super::scenario::Mode;
use crate::{Error, Result};

/// Sorted unique values with their cumulative fractions `k / n`.
pub fn ecdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::config("samples", "ECDF of an empty sample set"));
    }
    if let Some(bad) = samples.iter().find(|x| x.is_nan()) {
        return Err(Error::Numeric(format!("ECDF sample {bad}")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut table: Vec<(f64, f64)> = Vec::new();
    for (k, v) in sorted.iter().enumerate() {
        let frac = (k + 1) as f64 / n;
        match table.last_mut() {
            Some(last) if last.0 == *v => last.1 = frac,
            _ => table.push((*v, frac)),
        }
    }
    Ok(table)
}

/// Inverse ECDF: the smallest value whose cumulative fraction reaches `p`.
pub fn quantile(table: &[(f64, f64)], p: f64) -> f64 {
    table
        .iter()
        .find(|(_, f)| *f >= p - 1e-12)
        .or(table.last())
        .map(|(v, _)| *v)
        .unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub p10: f64,
    pub median: f64,
    pub p90: f64,
    pub max: f64,
}

impl Stats {
    pub fn from_ecdf(table: &[(f64, f64)]) -> Self {
        Self {
            min: table.first().map_or(f64::NAN, |e| e.0),
            p10: quantile(table, 0.1),
            median: quantile(table, 0.5),
            p90: quantile(table, 0.9),
            max: table.last().map_or(f64::NAN, |e| e.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub fingerprint: String,
    pub mode: Mode,
    pub altitude: f64,
    pub seed: u64,
    pub ticks: usize,
    pub handover_count: usize,
    pub switch_event_count: usize,
    pub rsrp: Stats,
    pub rsrq: Stats,
    pub sinr_dl: Stats,
    pub ul_tx: Stats,
    pub ul_sinr: Stats,
    pub ul_tput: Stats,
    pub ecdf_rsrp: Vec<(f64, f64)>,
    pub ecdf_rsrq: Vec<(f64, f64)>,
    pub ecdf_ul_tput: Vec<(f64, f64)>,
}

impl RunSummary {
    pub fn from_records(
        name: &str,
        fingerprint: &str,
        mode: Mode,
        altitude: f64,
        seed: u64,
        records: &[TickRecord],
        switch_event_count: usize,
    ) -> Result<Self> {
        let column = |f: fn(&TickRecord) -> f64| -> Result<Vec<(f64, f64)>> {
            ecdf(&records.iter().map(f).collect::<Vec<_>>())
        };
        let ecdf_rsrp = column(|r| r.rsrp_dbm)?;
        let ecdf_rsrq = column(|r| r.rsrq_db)?;
        let ecdf_ul_tput = column(|r| r.ul_tput_mbps)?;
        Ok(Self {
            name: name.to_owned(),
            fingerprint: fingerprint.to_owned(),
            mode,
            altitude,
            seed,
            ticks: records.len(),
            handover_count: records.iter().filter(|r| r.handover_flag).count(),
            switch_event_count,
            rsrp: Stats::from_ecdf(&ecdf_rsrp),
            rsrq: Stats::from_ecdf(&ecdf_rsrq),
            sinr_dl: Stats::from_ecdf(&column(|r| r.sinr_dl_db)?),
            ul_tx: Stats::from_ecdf(&column(|r| r.ul_tx_dbm)?),
            ul_sinr: Stats::from_ecdf(&column(|r| r.ul_sinr_db)?),
            ul_tput: Stats::from_ecdf(&ecdf_ul_tput),
            ecdf_rsrp,
            ecdf_rsrq,
            ecdf_ul_tput,
        })
    }
}
