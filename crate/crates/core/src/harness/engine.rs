//! Tick-driven simulation engine.
//!
//! A run has two phases. First, every trajectory sample is paired with the
//! UAV-independent link budget toward every sector; samples are independent
//! so this phase is data-parallel. Second, a sequential pass applies the beam
//! selector, builds the modem report, steps the handover state machine and
//! derives the uplink metrics.

use serde::{Deserialize, Serialize};

use super::metrics::RunSummary;
use super::scenario::{Mode, Scenario};
use crate::control::{handover_step, BeamSelector, HandoverEvent, MobilityState};
use crate::deployment::LinkBudget;
use crate::geokin::{bearing_elevation, normalize_360, sample_trajectory, UavState};
use crate::linkmetrics::{
    measurement_report, noise_power_dbm, ul_throughput, ul_tx_power, CellPorts, QualityParams,
};
use crate::par::{self, Execution};
use crate::{Error, Result};

/// `antenna_index` value recorded when the monopole is on the main port.
pub const OMNI_ANTENNA_INDEX: i32 = -1;

/// One modem reporting interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub time: f64,
    pub east: f64,
    pub north: f64,
    pub altitude: f64,
    pub heading: f64,
    pub mode: Mode,
    pub antenna_index: i32,
    pub serving_cell_id: u32,
    pub rsrp_dbm: f64,
    pub rsrq_db: f64,
    pub rssi_dbm: f64,
    pub sinr_dl_db: f64,
    pub ul_tx_dbm: f64,
    pub ul_sinr_db: f64,
    pub ul_tput_mbps: f64,
    pub handover_flag: bool,
}

impl TickRecord {
    fn check_finite(&self) -> Result<()> {
        let fields = [
            ("rsrp_dbm", self.rsrp_dbm),
            ("rsrq_db", self.rsrq_db),
            ("rssi_dbm", self.rssi_dbm),
            ("sinr_dl_db", self.sinr_dl_db),
            ("ul_tx_dbm", self.ul_tx_dbm),
            ("ul_sinr_db", self.ul_sinr_db),
            ("ul_tput_mbps", self.ul_tput_mbps),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Numeric(format!("{name} at t = {} s", self.time)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TickRecord>,
    pub handovers: Vec<HandoverEvent>,
    pub summary: RunSummary,
}

/// Per-sample link budgets toward every sector, in deployment order.
pub(crate) fn link_table(
    scenario: &Scenario,
    states: &[UavState],
    exec: Execution,
) -> Result<Vec<Vec<LinkBudget>>> {
    let seed = scenario.config.seed;
    par::map(states, exec, |s| scenario.deployment.link_budgets(&s.position, seed))
        .into_iter()
        .collect()
}

/// Cell search at the first sample: strongest monopole RSRP, lowest id on ties.
fn initial_serving(scenario: &Scenario, budgets: &[LinkBudget]) -> u32 {
    let omni = scenario.config.antenna.omni.gain;
    scenario
        .deployment
        .sectors()
        .iter()
        .zip(budgets)
        .max_by(|(sa, a), (sb, b)| {
            a.rsrp(omni)
                .total_cmp(&b.rsrp(omni))
                .then(sb.cell_id.cmp(&sa.cell_id))
        })
        .map(|(s, _)| s.cell_id)
        .expect("deployment has sectors")
}

pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput> {
    run_scenario_with(scenario, Execution::default())
}

pub fn run_scenario_with(scenario: &Scenario, exec: Execution) -> Result<RunOutput> {
    let cfg = &scenario.config;
    let states = sample_trajectory(&scenario.trajectory)?;
    let table = link_table(scenario, &states, exec)?;
    let sectors = scenario.deployment.sectors();
    let array = &cfg.antenna;
    let tick = scenario.trajectory.tick;

    let first_serving = initial_serving(scenario, &table[0]);
    let mut mobility = MobilityState::new(first_serving);
    let initial_face = crate::control::select_antenna(&states[0], &scenario.bs_db.position(first_serving)?, array)
        .unwrap_or(0);
    let mut selector = BeamSelector::new(initial_face, cfg.beam.dwell);

    let mut records = Vec::with_capacity(states.len());
    let mut ports = Vec::with_capacity(sectors.len());
    for (state, budgets) in states.iter().zip(&table) {
        let serving = mobility.serving_cell_id;
        let serving_idx = scenario
            .deployment
            .index_of(serving)
            .ok_or_else(|| Error::config("serving_cell_id", format!("unknown cell {serving}")))?;

        let antenna_index = match cfg.mode {
            Mode::Directional => {
                selector.update(state, &scenario.bs_db.position(serving)?, array);
                selector.current() as i32
            }
            Mode::Omni => OMNI_ANTENNA_INDEX,
        };

        ports.clear();
        for (sector, b) in sectors.iter().zip(budgets) {
            let omni = b.rsrp(array.omni.gain);
            ports.push(match cfg.mode {
                Mode::Directional => CellPorts {
                    cell_id: sector.cell_id,
                    data_port: b.rsrp(array.gain(selector.current(), state.heading, &b.direction)?),
                    aux_port: Some(omni),
                },
                Mode::Omni => CellPorts {
                    cell_id: sector.cell_id,
                    data_port: omni,
                    aux_port: None,
                },
            });
        }

        let serving_sector = &sectors[serving_idx];
        let report = measurement_report(
            state.time,
            &ports,
            serving,
            QualityParams {
                n_rb: serving_sector.bandwidth_rb,
                load: cfg.load,
                noise_figure: cfg.channel.noise_figure_ue,
            },
        )?;

        // coupling loss as the UE estimates it from the data port
        let pathloss_effective = serving_sector.power_per_re() - report.serving_rsrp;
        let ul_tx = ul_tx_power(&cfg.power_control, pathloss_effective);
        let ul_rx = ul_tx - pathloss_effective;
        let ul_sinr = ul_rx - noise_power_dbm(cfg.power_control.m_rb, cfg.channel.noise_figure_bs);
        let ul_tput = ul_throughput(&cfg.throughput, ul_sinr, cfg.power_control.m_rb);

        let handover = handover_step(&mut mobility, &report, &cfg.handover, tick);

        let record = TickRecord {
            time: state.time,
            east: state.position.east,
            north: state.position.north,
            altitude: state.position.up,
            heading: state.heading,
            mode: cfg.mode,
            antenna_index,
            serving_cell_id: serving,
            rsrp_dbm: report.serving_rsrp,
            rsrq_db: report.rsrq,
            rssi_dbm: report.rssi,
            sinr_dl_db: report.sinr_dl,
            ul_tx_dbm: ul_tx,
            ul_sinr_db: ul_sinr,
            ul_tput_mbps: ul_tput,
            handover_flag: handover.is_some(),
        };
        record.check_finite()?;
        records.push(record);
    }

    let summary = RunSummary::from_records(
        &cfg.name,
        &cfg.fingerprint()?,
        cfg.mode,
        cfg.altitude,
        cfg.seed,
        &records,
        selector.switch_count(),
    )?;
    Ok(RunOutput {
        records,
        handovers: mobility.handover_log,
        summary,
    })
}

/// One sample of a beam-switch replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchSample {
    pub time: f64,
    pub east: f64,
    pub north: f64,
    /// Bearing of the target BS relative to the airframe heading, `[0, 360)`.
    pub relative_bearing: f64,
    pub antenna_index: usize,
    pub switched: bool,
}

#[derive(Debug, Clone)]
pub struct SwitchReplay {
    pub target_cell_id: u32,
    pub samples: Vec<SwitchSample>,
    pub switch_count: usize,
}

/// Antenna index along the trajectory while steering at one fixed cell
/// (`replay.serving_cell`, or the initial serving cell). No handovers.
pub fn replay_switch(scenario: &Scenario) -> Result<SwitchReplay> {
    let cfg = &scenario.config;
    let states = sample_trajectory(&scenario.trajectory)?;
    let target = match cfg.replay.serving_cell {
        Some(cell) => cell,
        None => {
            let first = scenario.deployment.link_budgets(&states[0].position, cfg.seed)?;
            initial_serving(scenario, &first)
        }
    };
    let bs = scenario.bs_db.position(target)?;
    let initial = crate::control::select_antenna(&states[0], &bs, &cfg.antenna).unwrap_or(0);
    let mut selector = BeamSelector::new(initial, cfg.beam.dwell);
    let samples = states
        .iter()
        .map(|s| {
            let switched = selector.update(s, &bs, &cfg.antenna);
            SwitchSample {
                time: s.time,
                east: s.position.east,
                north: s.position.north,
                relative_bearing: normalize_360(bearing_elevation(&s.position, &bs).bearing - s.heading),
                antenna_index: selector.current(),
                switched,
            }
        })
        .collect();
    Ok(SwitchReplay {
        target_cell_id: target,
        samples,
        switch_count: selector.switch_count(),
    })
}
