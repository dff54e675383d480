//! A/B comparison of two runs over the same scenario.

use serde::{Deserialize, Serialize};

use super::metrics::RunSummary;
use super::scenario::Mode;
use crate::{Error, Result};

/// Median deltas are `a - b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub name: String,
    pub fingerprint: String,
    pub altitude: f64,
    pub mode_a: Mode,
    pub mode_b: Mode,
    pub delta_median_rsrp: f64,
    pub delta_median_rsrq: f64,
    pub delta_median_sinr_dl: f64,
    pub delta_median_ul_tx: f64,
    pub delta_median_ul_tput: f64,
    pub handovers_a: usize,
    pub handovers_b: usize,
    pub switches_a: usize,
    pub switches_b: usize,
}

pub fn compare_modes(a: &RunSummary, b: &RunSummary) -> Result<ComparisonReport> {
    if a.fingerprint != b.fingerprint {
        return Err(Error::Mismatch(format!(
            "runs come from different scenarios ({} vs {})",
            a.fingerprint, b.fingerprint
        )));
    }
    Ok(ComparisonReport {
        name: a.name.clone(),
        fingerprint: a.fingerprint.clone(),
        altitude: a.altitude,
        mode_a: a.mode,
        mode_b: b.mode,
        delta_median_rsrp: a.rsrp.median - b.rsrp.median,
        delta_median_rsrq: a.rsrq.median - b.rsrq.median,
        delta_median_sinr_dl: a.sinr_dl.median - b.sinr_dl.median,
        delta_median_ul_tx: a.ul_tx.median - b.ul_tx.median,
        delta_median_ul_tput: a.ul_tput.median - b.ul_tput.median,
        handovers_a: a.handover_count,
        handovers_b: b.handover_count,
        switches_a: a.switch_event_count,
        switches_b: b.switch_event_count,
    })
}

/// Plain-text table, one row per report (typically one per altitude).
pub fn render_table(reports: &[ComparisonReport]) -> String {
    let mut out = String::from(
        "altitude_m  modes                 dRSRP_dB  dRSRQ_dB  dSINR_dB  dULtx_dB  dULtput_Mbps  handovers  switches\n",
    );
    for r in reports {
        out.push_str(&format!(
            "{:>10.1}  {:<20}  {:>8.3}  {:>8.3}  {:>8.3}  {:>8.3}  {:>12.3}  {:>4} vs {:<2}  {:>3} vs {}\n",
            r.altitude,
            format!("{} - {}", r.mode_a, r.mode_b),
            r.delta_median_rsrp,
            r.delta_median_rsrq,
            r.delta_median_sinr_dl,
            r.delta_median_ul_tx,
            r.delta_median_ul_tput,
            r.handovers_a,
            r.handovers_b,
            r.switches_a,
            r.switches_b,
        ));
    }
    out
}
