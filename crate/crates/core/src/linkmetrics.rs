//! Modem-level LTE quantities: RSSI/RSRQ/SINR, the dual-port measurement
//! report, open-loop uplink power control and the throughput mapping.

use serde::{Deserialize, Serialize};

use crate::{db_to_lin, lin_to_db, Error, Result};

/// Maximum number of cells in one modem measurement report.
pub const MAX_REPORTED_CELLS: usize = 8;
pub const SUBCARRIERS_PER_RB: f64 = 12.0;
pub const RB_BANDWIDTH_HZ: f64 = 180_000.0;
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Thermal noise over `n_rb` resource blocks, dBm.
pub fn noise_power_dbm(n_rb: u32, noise_figure: f64) -> f64 {
    THERMAL_NOISE_DBM_HZ + 10.0 * (f64::from(n_rb) * RB_BANDWIDTH_HZ).log10() + noise_figure
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkQuality {
    pub rssi: f64,
    pub rsrq: f64,
    pub sinr: f64,
}

/// RSSI, RSRQ and per-resource-element SINR for a serving cell.
///
/// All RSRP inputs are per resource element. `load` scales the interfering
/// cells' occupied resource elements; the serving cell is counted fully.
pub fn link_quality(
    serving_rsrp: f64,
    interferer_rsrps: &[f64],
    n_rb: u32,
    load: f64,
    noise_figure: f64,
) -> Result<LinkQuality> {
    if !serving_rsrp.is_finite() {
        return Err(Error::Numeric(format!("serving RSRP {serving_rsrp}")));
    }
    if n_rb == 0 {
        return Err(Error::config("n_rb", "must be > 0"));
    }
    if !(0.0..=1.0).contains(&load) {
        return Err(Error::config("load", format!("{load} outside [0, 1]")));
    }
    if noise_figure.is_nan() {
        return Err(Error::Numeric("noise figure".into()));
    }
    let n_re = SUBCARRIERS_PER_RB * f64::from(n_rb);
    let s = db_to_lin(serving_rsrp);
    let i: f64 = interferer_rsrps.iter().map(|&r| db_to_lin(r)).sum();
    let noise = db_to_lin(noise_power_dbm(n_rb, noise_figure));
    let rssi = n_re * (s + load * i) + noise;
    let rsrq = lin_to_db(f64::from(n_rb) * s / rssi);
    let sinr = lin_to_db(s / (load * i + noise / n_re));
    Ok(LinkQuality {
        rssi: lin_to_db(rssi),
        rsrq,
        sinr,
    })
}

/// RSRP of one cell on each active UAV antenna port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPorts {
    pub cell_id: u32,
    /// Main port, carries data (the selected patch, or the monopole in omni mode).
    pub data_port: f64,
    /// Auxiliary receive-diversity port (the monopole), when active.
    pub aux_port: Option<f64>,
}

impl CellPorts {
    /// What the modem reports upward: the best port.
    pub fn reported(&self) -> f64 {
        match self.aux_port {
            Some(aux) => self.data_port.max(aux),
            None => self.data_port,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMeasurement {
    pub cell_id: u32,
    pub data_port_rsrp: f64,
    pub aux_port_rsrp: Option<f64>,
    pub reported_rsrp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModemReport {
    pub time: f64,
    pub serving_cell_id: u32,
    /// At most eight cells, best reported RSRP first, ties by ascending cell id.
    pub measurements: Vec<CellMeasurement>,
    /// Data-port RSRP of the serving cell.
    pub serving_rsrp: f64,
    pub rssi: f64,
    pub rsrq: f64,
    pub sinr_dl: f64,
}

impl ModemReport {
    pub fn serving(&self) -> &CellMeasurement {
        self.measurements
            .iter()
            .find(|m| m.cell_id == self.serving_cell_id)
            .expect("report always contains the serving cell")
    }

    /// Strongest reported cell other than the serving one.
    pub fn best_neighbor(&self) -> Option<&CellMeasurement> {
        self.measurements.iter().find(|m| m.cell_id != self.serving_cell_id)
    }
}

/// Receiver settings for the serving-cell quality computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityParams {
    pub n_rb: u32,
    pub load: f64,
    pub noise_figure: f64,
}

/// Builds a modem report from per-cell port measurements.
///
/// Cells are ranked by reported (max-port) RSRP and truncated to eight; if
/// the serving cell would fall off the list it takes the eighth slot. The
/// serving-cell quality uses data-port values for the serving cell and for
/// every other cell in `cells` as interference.
pub fn measurement_report(time: f64, cells: &[CellPorts], serving_id: u32, q: QualityParams) -> Result<ModemReport> {
    let serving = cells
        .iter()
        .find(|c| c.cell_id == serving_id)
        .ok_or_else(|| Error::config("serving_cell_id", format!("cell {serving_id} not in measurement set")))?;

    let mut ranked: Vec<CellMeasurement> = cells
        .iter()
        .map(|c| CellMeasurement {
            cell_id: c.cell_id,
            data_port_rsrp: c.data_port,
            aux_port_rsrp: c.aux_port,
            reported_rsrp: c.reported(),
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.reported_rsrp
            .total_cmp(&a.reported_rsrp)
            .then(a.cell_id.cmp(&b.cell_id))
    });
    if let Some(pos) = ranked.iter().position(|m| m.cell_id == serving_id) {
        if pos >= MAX_REPORTED_CELLS {
            let s = ranked.remove(pos);
            ranked.truncate(MAX_REPORTED_CELLS - 1);
            ranked.push(s);
        }
    }
    ranked.truncate(MAX_REPORTED_CELLS);

    let interferers: Vec<f64> = cells
        .iter()
        .filter(|c| c.cell_id != serving_id)
        .map(|c| c.data_port)
        .collect();
    let quality = link_quality(serving.data_port, &interferers, q.n_rb, q.load, q.noise_figure)?;

    Ok(ModemReport {
        time,
        serving_cell_id: serving_id,
        measurements: ranked,
        serving_rsrp: serving.data_port,
        rssi: quality.rssi,
        rsrq: quality.rsrq,
        sinr_dl: quality.sinr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerControlParams {
    pub p_max: f64,
    /// Target received power per resource block, dBm.
    pub p0: f64,
    pub alpha: f64,
    pub m_rb: u32,
}

impl Default for PowerControlParams {
    fn default() -> Self {
        Self {
            p_max: 23.0,
            p0: -96.0,
            alpha: 1.0,
            m_rb: 50,
        }
    }
}

impl PowerControlParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config(format!("{path}.alpha"), "must be in [0, 1]"));
        }
        if self.m_rb < 1 {
            return Err(Error::config(format!("{path}.m_rb"), "must be >= 1"));
        }
        if !self.p_max.is_finite() || !self.p0.is_finite() {
            return Err(Error::config(path, "p_max and p0 must be finite"));
        }
        Ok(())
    }
}

/// Open-loop fractional power control. `pathloss_effective` is the coupling
/// loss, i.e. path loss net of both antenna gains.
pub fn ul_tx_power(pc: &PowerControlParams, pathloss_effective: f64) -> f64 {
    let open_loop = pc.p0 + 10.0 * f64::from(pc.m_rb).log10() + pc.alpha * pathloss_effective;
    open_loop.min(pc.p_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThroughputMap {
    pub bw_eff: f64,
    pub sinr_eff: f64,
    /// bit/s/Hz
    pub max_spectral_eff: f64,
}

impl Default for ThroughputMap {
    fn default() -> Self {
        Self {
            bw_eff: 0.6,
            sinr_eff: 1.0,
            max_spectral_eff: 4.32,
        }
    }
}

impl ThroughputMap {
    pub fn validate(&self, path: &str) -> Result<()> {
        for (name, v) in [
            ("bw_eff", self.bw_eff),
            ("sinr_eff", self.sinr_eff),
            ("max_spectral_eff", self.max_spectral_eff),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{path}.{name}"), "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Attenuated-Shannon throughput in Mbit/s.
pub fn ul_throughput(tm: &ThroughputMap, sinr_ul: f64, n_rb: u32) -> f64 {
    let bandwidth = f64::from(n_rb) * RB_BANDWIDTH_HZ;
    let shannon = tm.bw_eff * bandwidth * (1.0 + db_to_lin(sinr_ul) / tm.sinr_eff).log2();
    shannon.min(tm.max_spectral_eff * bandwidth) / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rsrq_single_cell_ceiling() {
        let q = link_quality(-60.0, &[], 50, 1.0, f64::NEG_INFINITY).unwrap();
        assert!(close(q.rsrq, 10.0 * (1.0f64 / 12.0).log10(), 1e-12));
        assert!(close(q.rsrq, -10.79, 0.005));
    }

    #[test]
    fn sinr_direct_ratio() {
        let q = link_quality(-60.0, &[-70.0], 50, 1.0, f64::NEG_INFINITY).unwrap();
        assert!(close(q.sinr, 10.0, 1e-9));
    }

    #[test]
    fn rssi_composition() {
        // noise-only RSSI equals the thermal floor over the band
        let q = link_quality(-300.0, &[], 50, 1.0, 7.0).unwrap();
        assert!(close(q.rssi, noise_power_dbm(50, 7.0), 1e-9));
        assert!(close(noise_power_dbm(50, 0.0), -174.0 + 10.0 * 9e6f64.log10(), 1e-12));
    }

    #[test]
    fn quality_errors() {
        assert!(link_quality(f64::NEG_INFINITY, &[], 50, 1.0, 7.0).is_err());
        assert!(link_quality(-60.0, &[], 0, 1.0, 7.0).is_err());
        assert!(link_quality(-60.0, &[], 50, 1.5, 7.0).is_err());
    }

    fn q() -> QualityParams {
        QualityParams {
            n_rb: 50,
            load: 1.0,
            noise_figure: 7.0,
        }
    }

    #[test]
    fn report_uses_max_port() {
        let cells = [CellPorts {
            cell_id: 1,
            data_port: -80.0,
            aux_port: Some(-85.0),
        }];
        let r = measurement_report(0.0, &cells, 1, q()).unwrap();
        assert_eq!(r.measurements[0].reported_rsrp, -80.0);
        assert_eq!(r.serving_rsrp, -80.0);

        let cells = [CellPorts {
            cell_id: 1,
            data_port: -90.0,
            aux_port: Some(-85.0),
        }];
        let r = measurement_report(0.0, &cells, 1, q()).unwrap();
        assert_eq!(r.measurements[0].reported_rsrp, -85.0);
        // serving quality still on the data port
        assert_eq!(r.serving_rsrp, -90.0);

        let cells = [CellPorts {
            cell_id: 1,
            data_port: -77.0,
            aux_port: None,
        }];
        let r = measurement_report(0.0, &cells, 1, q()).unwrap();
        assert_eq!(r.measurements[0].reported_rsrp, -77.0);
    }

    #[test]
    fn report_truncates_to_eight_and_keeps_serving() {
        let cells: Vec<CellPorts> = (0..10)
            .map(|i| CellPorts {
                cell_id: i,
                data_port: -60.0 - i as f64,
                aux_port: None,
            })
            .collect();
        let r = measurement_report(0.0, &cells, 0, q()).unwrap();
        assert_eq!(r.measurements.len(), 8);
        assert_eq!(r.measurements[0].cell_id, 0);

        let r = measurement_report(0.0, &cells, 9, q()).unwrap();
        assert_eq!(r.measurements.len(), 8);
        assert_eq!(r.serving().cell_id, 9);
        assert_eq!(r.best_neighbor().unwrap().cell_id, 0);
        let ids: Vec<u32> = r.measurements.iter().map(|m| m.cell_id).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4, 5, 6, 9]);

        assert!(measurement_report(0.0, &cells, 42, q()).is_err());
    }

    #[test]
    fn report_tie_break_by_cell_id() {
        let cells: Vec<CellPorts> = [5u32, 2, 9]
            .iter()
            .map(|&id| CellPorts {
                cell_id: id,
                data_port: -70.0,
                aux_port: None,
            })
            .collect();
        let r = measurement_report(0.0, &cells, 9, q()).unwrap();
        let ids: Vec<u32> = r.measurements.iter().map(|m| m.cell_id).collect();
        assert_eq!(ids, vec![2, 5, 9]);
    }

    #[test]
    fn power_control_examples() {
        let pc = PowerControlParams::default();
        let p = ul_tx_power(&pc, 100.0);
        assert!(close(p, -96.0 + 10.0 * 50f64.log10() + 100.0, 1e-12));
        assert!(close(p, 20.99, 0.005));
        assert_eq!(ul_tx_power(&pc, 130.0), 23.0);
        let flat = PowerControlParams { alpha: 0.0, ..pc };
        assert_eq!(ul_tx_power(&flat, 80.0), ul_tx_power(&flat, 140.0));
        assert!(close(ul_tx_power(&flat, 80.0), -96.0 + 10.0 * 50f64.log10(), 1e-12));
    }

    #[test]
    fn throughput_examples() {
        let tm = ThroughputMap::default();
        assert_eq!(ul_throughput(&tm, f64::NEG_INFINITY, 50), 0.0);
        assert!(close(ul_throughput(&tm, 30.0, 50), 38.88, 1e-9));
        assert!(close(ul_throughput(&tm, 0.0, 50), 5.4, 1e-9));
    }

    proptest! {
        #[test]
        fn rsrq_full_load_ceiling(s in -130.0f64..-40.0, i in proptest::collection::vec(-140.0f64..-40.0, 0..12), nf in 0.0f64..10.0) {
            let q = link_quality(s, &i, 50, 1.0, nf).unwrap();
            prop_assert!(q.rsrq <= 10.0 * (1.0f64 / 12.0).log10() + 1e-9);
        }

        #[test]
        fn common_interference_attenuation_raises_rsrq(s in -100.0f64..-50.0,
                                                      i in proptest::collection::vec(-110.0f64..-50.0, 1..8),
                                                      att in 0.1f64..20.0) {
            let base = link_quality(s, &i, 50, 1.0, 7.0).unwrap();
            let filtered: Vec<f64> = i.iter().map(|x| x - att).collect();
            let better = link_quality(s, &filtered, 50, 1.0, 7.0).unwrap();
            prop_assert!(better.rsrq > base.rsrq);
            prop_assert!(better.sinr > base.sinr);
        }

        #[test]
        fn linear_region_rx_power_independent_of_gain(pl in 60.0f64..100.0, g_ue in 0.0f64..10.0) {
            // received = tx + gains - PL = tx - PL_eff
            let pc = PowerControlParams::default();
            let pl_eff = pl - g_ue;
            let rx = ul_tx_power(&pc, pl_eff) - pl_eff;
            let rx_ref = ul_tx_power(&pc, pl) - pl;
            prop_assert!((rx - rx_ref).abs() < 1e-9);
        }
    }
}
